#include "tenk/grader/criteria.hpp"

#include "tenk/text.hpp"

namespace tenk::grader {

namespace {

constexpr std::string_view kScaleLine = "You should give the text a decimal numeric grade between 0 and 2.";
constexpr std::string_view kAnswerLine = "Answer only with a decimal number in the 0-2 range.";

struct Rubric {
    std::string_view top, mid, low;
};

constexpr std::array<Rubric, 4> kRubrics = {{
    {"2. The text is confident about robust growth and of greater returns next financial year.",
     "1. Text in this category gives strong likelihood of company stability, but is either relatively unsure about "
     "future growth or not confident about it.",
     "0. Text in this category shows that the company is not very robust, uncertain about its future, and most "
     "importantly, shows inconsistent and bad finances."},
    {"2. The text offers actionable plans relating to environment and sustainability and includes sustainability as "
     "a central goal.",
     "1. Text in this category mentions commitments to sustainability and environment, but doesn't offer many "
     "actionable plans for the same.",
     "0. Text in this category doesn't mention the environment and sustainability at all."},
    {"2. The text shows future plans as well as actions that the company has taken towards greater innovation in its "
     "operations. It also mentions a working R&D unit.",
     "1. Text mentions commitment to improve its practices and operations, and mentions innovation. However, there is "
     "little to no work done for the same in this current document.",
     "0. Text emphasizes continuing its operations next year in the same manner, without any new innovations."},
    {"2. The text acknowledges the importance of people and talent in driving the company forward. It also mentions "
     "actionable plans to attract new talent and ensure employee welfare.",
     "1. Text mentions importance of people and talent to its operations but doesn't mention any employee welfare "
     "activities.",
     "0. Text makes no mention of employee welfare and importance of people talent."},
}};

Criterion make(Dimension d) {
    const auto& r = kRubrics[static_cast<std::size_t>(d)];
    std::string body = "## Criterion\n";
    for (auto line : {kScaleLine, r.top, r.mid, r.low, kAnswerLine}) {
        body += line;
        body += '\n';
    }
    body.pop_back();
    return Criterion{d, std::move(body)};
}

}  // namespace

std::string_view to_string(Dimension d) noexcept {
    switch (d) {
        case Dimension::Confidence: return "confidence";
        case Dimension::Environment: return "environment";
        case Dimension::Innovation: return "innovation";
        case Dimension::People: return "people";
    }
    return "?";
}

std::string_view to_string(GraderMode m) noexcept { return m == GraderMode::Strict ? "strict" : "normal"; }

std::optional<Dimension> parse_dimension(std::string_view s) {
    auto lower = text::to_lower_ascii(s);
    for (auto d : kDimensions) {
        if (lower == to_string(d)) return d;
    }
    return std::nullopt;
}

std::optional<GraderMode> parse_mode(std::string_view s) {
    auto lower = text::to_lower_ascii(s);
    if (lower == "normal") return GraderMode::Normal;
    if (lower == "strict") return GraderMode::Strict;
    return std::nullopt;
}

const Criterion& criterion_for(Dimension d) {
    static const std::array<Criterion, 4> all = {make(Dimension::Confidence), make(Dimension::Environment),
                                                 make(Dimension::Innovation), make(Dimension::People)};
    return all[static_cast<std::size_t>(d)];
}

std::string_view criterion_marker(Dimension d) { return kRubrics[static_cast<std::size_t>(d)].top; }

}  // namespace tenk::grader
