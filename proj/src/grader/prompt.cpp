#include "tenk/grader/prompt.hpp"

#include <vector>

#include "tenk/hash.hpp"

namespace tenk::grader {

const PromptTemplate& PromptTemplate::standard() {
    static const PromptTemplate t{
        "You are an AI grader that, given an output and a criterion, grades the completion based on the prompt and "
        "criterion. Below is a prompt, a completion, and a criterion with which to grade the completion. You need to "
        "respond according to the criterion instructions. For reference, these are documents from the year {year}.\n"
        "{strict_phrase}\n"
        "\n"
        "Output:\n"
        "{narrative}\n"
        "\n"
        "Criterion:\n"
        "{criterion}",
        "You are an especially strict grader. Award high grades only when the text fully and explicitly satisfies the "
        "criterion; when in doubt, grade lower.",
        "absolute-v1",
    };
    return t;
}

std::string expand_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string_view, std::string_view>>& slots) {
    std::string out;
    out.reserve(tmpl.size() + 256);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto name = tmpl.substr(i + 1, close - i - 1);
                bool replaced = false;
                for (const auto& [slot, value] : slots) {
                    if (slot == name) {
                        out += value;
                        replaced = true;
                        break;
                    }
                }
                if (replaced) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

std::string build_absolute_prompt(std::string_view narrative, const Criterion& criterion, int year, GraderMode mode,
                                  const PromptTemplate& tmpl) {
    auto year_text = std::to_string(year);
    std::string_view strict = mode == GraderMode::Strict ? std::string_view(tmpl.strict_phrase) : std::string_view();
    return expand_template(tmpl.base, {{"year", year_text},
                                       {"strict_phrase", strict},
                                       {"narrative", narrative},
                                       {"criterion", criterion.rubric_text}});
}

std::string prompt_hash(std::string_view prompt) { return sha256_hex(prompt); }

}  // namespace tenk::grader
