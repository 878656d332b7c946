#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tenk/grader/grading.hpp"
#include "tenk/parser/element.hpp"

namespace tenk::comparator {

using parser::SectionId;

enum class Verdict { A, B, C, Inconclusive };

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> verdict_from_string(std::string_view s) noexcept;

struct Entrant {
    std::string ticker;
    std::string excerpt;
    bool operator==(const Entrant&) const = default;
};

struct ComparisonTask {
    SectionId section = SectionId::Unknown;
    int fiscal_year = 0;
    std::array<Entrant, 3> entrants;

    /// Throws InvalidArgument on an empty excerpt or a repeated ticker.
    void validate() const;
};

inline constexpr std::string_view kComparisonTemplateVersion = "relative-v1";

/// Three-slot relative-analysis prompt; excerpts land under
/// "## Excerpt A", "## Excerpt B" and "## Excerpt C" in that order.
std::string build_comparison_prompt(std::string_view a, std::string_view b, std::string_view c);

/// First standalone A/B/C token (case-insensitive); Inconclusive otherwise.
Verdict parse_verdict(std::string_view completion) noexcept;

struct RotationOutcome {
    /// Ticker in slot A, B, C.
    std::array<std::string, 3> ordering;
    Verdict verdict = Verdict::Inconclusive;
    /// Ticker occupying the chosen slot.
    std::optional<std::string> chosen;
    std::string prompt_hash;
    std::string raw_completion;
    std::string error;
    bool operator==(const RotationOutcome&) const = default;
};

struct ComparisonResult {
    SectionId section = SectionId::Unknown;
    int fiscal_year = 0;
    std::array<std::string, 3> tickers;
    std::vector<RotationOutcome> rotations;
    std::optional<std::string> winner;
    bool operator==(const ComparisonResult&) const = default;
};

/// Entrant with most wins, if its wins form a strict majority of the
/// rotations run (2 of 3, or 1 of 1).
std::optional<std::string> majority_winner(const std::vector<RotationOutcome>& rotations);

struct ComparisonTranscriptRecord {
    SectionId section;
    int fiscal_year;
    std::size_t rotation;
    std::array<std::string, 3> ordering;
    std::string prompt_hash;
    std::string raw_completion;
    Verdict verdict;
    std::optional<std::string> chosen;
    std::string error;
};

struct CompareOptions {
    /// 3 (cyclic, position-bias controlled) or 1 (single shot).
    int rotations = 3;
    int max_output_tokens = 64;
    std::function<void(const ComparisonTranscriptRecord&)> transcript;
};

/// Per-excerpt token budget: (context - 2000) / 3.
std::size_t excerpt_token_budget(std::size_t context_window_tokens);

/// Throws ProviderFailure when every rotation errored.
ComparisonResult run_comparison(const ComparisonTask& task, grader::CompletionProvider& provider,
                                const CompareOptions& options = {});

struct SkippedComparison {
    SectionId section;
    int fiscal_year;
    std::vector<std::string> missing;
};

struct ComparisonPlan {
    std::vector<ComparisonTask> tasks;
    std::vector<SkippedComparison> skipped;
};

/// Default sections for relative analysis.
std::vector<SectionId> default_comparison_sections();

/// One task per (section, fiscal year) present for at least one of the
/// three companies; years align on the extracted fiscal year. A company
/// with no narrative for that section/year makes the task skipped.
/// `filings` holds every filing of the three companies, in any order; the
/// entrant order follows `tickers`.
ComparisonPlan plan_comparisons(const std::array<std::string, 3>& tickers,
                                const std::vector<parser::SectionedFiling>& filings,
                                const std::vector<SectionId>& sections);

/// Narrative text of one section, blank-line joined.
std::string section_excerpt(const parser::SectionedFiling& filing, SectionId section);

struct WinTable {
    std::map<std::pair<std::string, SectionId>, std::size_t> wins;
    std::map<std::string, std::size_t> totals;
    std::size_t inconclusive = 0;

    std::size_t at(const std::string& ticker, SectionId section) const;
};

WinTable tally_wins(const std::vector<ComparisonResult>& results);

}  // namespace tenk::comparator
