#include "tenk/comparator/comparator.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tenk/error.hpp"
#include "tenk/grader/prompt.hpp"
#include "tenk/text.hpp"

namespace tenk::comparator {

namespace {

constexpr std::string_view kTemplate =
    "You are an AI grader that, given an output and a criterion, grades the completion based on the prompt and "
    "criterion. Below \"Excerpt A\", \"Excerpt B\", and \"Excerpt C\", you must compare all excerpts and output which "
    "excerpt is better.\n"
    "\n"
    "## Excerpt A\n"
    "{excerpt_1}\n"
    "\n"
    "## Excerpt B\n"
    "{excerpt_2}\n"
    "\n"
    "## Excerpt C\n"
    "{excerpt_3}\n"
    "\n"
    "## Criterion\n"
    "Do not focus on the grammar; instead, focus on the overall future plan and robust explainability.\n"
    "\n"
    "[Answer with either \"A\", \"B\", or \"C\"]\n"
    "A. If Excerpt A is the best, detailed, transparent with robust financials.\n"
    "B. If Excerpt B is the best, detailed, transparent with robust financials.\n"
    "C. If Excerpt C is the best, detailed, transparent with robust financials.";

bool is_word_byte(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_';
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::A: return "A";
        case Verdict::B: return "B";
        case Verdict::C: return "C";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

std::optional<Verdict> verdict_from_string(std::string_view s) noexcept {
    if (s == "A") return Verdict::A;
    if (s == "B") return Verdict::B;
    if (s == "C") return Verdict::C;
    if (s == "Inconclusive") return Verdict::Inconclusive;
    return std::nullopt;
}

void ComparisonTask::validate() const {
    std::set<std::string> seen;
    for (const auto& e : entrants) {
        if (text::normalize_whitespace(e.excerpt).empty()) {
            throw Error(ErrorCode::InvalidArgument, "empty excerpt for " + e.ticker);
        }
        if (!seen.insert(e.ticker).second) throw Error(ErrorCode::InvalidArgument, "duplicate entrant " + e.ticker);
    }
}

std::string build_comparison_prompt(std::string_view a, std::string_view b, std::string_view c) {
    return grader::expand_template(kTemplate, {{"excerpt_1", a}, {"excerpt_2", b}, {"excerpt_3", c}});
}

Verdict parse_verdict(std::string_view s) noexcept {
    for (std::size_t i = 0; i < s.size(); ++i) {
        char up = static_cast<char>(std::toupper(static_cast<unsigned char>(s[i])));
        if (up != 'A' && up != 'B' && up != 'C') continue;
        bool left = i == 0 || !is_word_byte(s[i - 1]);
        bool right = i + 1 == s.size() || !is_word_byte(s[i + 1]);
        if (left && right) return up == 'A' ? Verdict::A : up == 'B' ? Verdict::B : Verdict::C;
    }
    return Verdict::Inconclusive;
}

std::optional<std::string> majority_winner(const std::vector<RotationOutcome>& rotations) {
    std::map<std::string, std::size_t> wins;
    for (const auto& r : rotations) {
        if (r.chosen) ++wins[*r.chosen];
    }
    for (const auto& [ticker, n] : wins) {
        if (n * 2 > rotations.size()) return ticker;
    }
    return std::nullopt;
}

std::size_t excerpt_token_budget(std::size_t context_window_tokens) {
    if (context_window_tokens <= grader::kPromptReserveTokens + 3) {
        throw Error(ErrorCode::InvalidArgument,
                    "context window too small for three excerpts: " + std::to_string(context_window_tokens));
    }
    return (context_window_tokens - grader::kPromptReserveTokens) / 3;
}

ComparisonResult run_comparison(const ComparisonTask& task, grader::CompletionProvider& provider,
                                const CompareOptions& options) {
    task.validate();
    if (options.rotations != 1 && options.rotations != 3) {
        throw Error(ErrorCode::InvalidArgument, "rotations must be 1 or 3");
    }
    auto budget = excerpt_token_budget(provider.context_window_tokens());
    std::array<std::string, 3> excerpts;
    for (std::size_t i = 0; i < 3; ++i) excerpts[i] = text::truncate_to_tokens(task.entrants[i].excerpt, budget);

    ComparisonResult result;
    result.section = task.section;
    result.fiscal_year = task.fiscal_year;
    for (std::size_t i = 0; i < 3; ++i) result.tickers[i] = task.entrants[i].ticker;

    std::size_t errored = 0;
    for (int r = 0; r < options.rotations; ++r) {
        // Rotation r puts entrant (r + slot) % 3 in each slot.
        std::array<std::size_t, 3> who{};
        RotationOutcome out;
        for (std::size_t slot = 0; slot < 3; ++slot) {
            who[slot] = (static_cast<std::size_t>(r) + slot) % 3;
            out.ordering[slot] = task.entrants[who[slot]].ticker;
        }
        auto prompt = build_comparison_prompt(excerpts[who[0]], excerpts[who[1]], excerpts[who[2]]);
        out.prompt_hash = grader::prompt_hash(prompt);
        try {
            out.raw_completion = provider.complete(prompt, options.max_output_tokens, 0.0);
            out.verdict = parse_verdict(out.raw_completion);
            if (out.verdict != Verdict::Inconclusive) {
                out.chosen = out.ordering[static_cast<std::size_t>(out.verdict)];
            }
        } catch (const Error& e) {
            ++errored;
            out.error = e.what();
        }
        if (options.transcript) {
            options.transcript({task.section, task.fiscal_year, static_cast<std::size_t>(r), out.ordering,
                                out.prompt_hash, out.raw_completion, out.verdict, out.chosen, out.error});
        }
        result.rotations.push_back(std::move(out));
    }
    if (errored == result.rotations.size()) {
        throw Error(ErrorCode::ProviderFailure, "all rotations failed: " + result.rotations.back().error);
    }
    result.winner = majority_winner(result.rotations);
    return result;
}

std::vector<SectionId> default_comparison_sections() {
    return {SectionId::Item1, SectionId::Item1A, SectionId::Item7, SectionId::Item7A};
}

std::string section_excerpt(const parser::SectionedFiling& filing, SectionId section) {
    std::vector<std::string> parts;
    for (const auto& el : filing.elements) {
        if (el.section == section && el.element_type == parser::ElementType::NarrativeText) parts.push_back(el.text);
    }
    return text::join(parts, "\n\n");
}

ComparisonPlan plan_comparisons(const std::array<std::string, 3>& tickers,
                                const std::vector<parser::SectionedFiling>& filings,
                                const std::vector<SectionId>& sections) {
    std::map<std::pair<std::string, int>, const parser::SectionedFiling*> by_key;
    std::set<int> years;
    for (const auto& f : filings) {
        if (std::find(tickers.begin(), tickers.end(), f.company) == tickers.end()) continue;
        by_key[{f.company, f.fiscal_year}] = &f;
        years.insert(f.fiscal_year);
    }
    ComparisonPlan plan;
    for (int year : years) {
        for (auto section : sections) {
            ComparisonTask task{section, year, {}};
            SkippedComparison skipped{section, year, {}};
            for (std::size_t i = 0; i < 3; ++i) {
                auto it = by_key.find({tickers[i], year});
                std::string excerpt = it == by_key.end() ? "" : section_excerpt(*it->second, section);
                if (excerpt.empty()) skipped.missing.push_back(tickers[i]);
                task.entrants[i] = Entrant{tickers[i], std::move(excerpt)};
            }
            if (skipped.missing.empty()) {
                plan.tasks.push_back(std::move(task));
            } else {
                plan.skipped.push_back(std::move(skipped));
            }
        }
    }
    return plan;
}

std::size_t WinTable::at(const std::string& ticker, SectionId section) const {
    auto it = wins.find({ticker, section});
    return it == wins.end() ? 0 : it->second;
}

WinTable tally_wins(const std::vector<ComparisonResult>& results) {
    WinTable table;
    for (const auto& r : results) {
        if (!r.winner) {
            ++table.inconclusive;
            continue;
        }
        ++table.wins[{*r.winner, r.section}];
        ++table.totals[*r.winner];
    }
    return table;
}

}  // namespace tenk::comparator
