#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tenk/analytics/report.hpp"
#include "tenk/analytics/store.hpp"
#include "tenk/comparator/comparator.hpp"
#include "tenk/edgar/edgar_client.hpp"
#include "tenk/grader/grading.hpp"
#include "tenk/parser/filing_parser.hpp"

namespace tenk::service {

using parser::SectionId;

struct AnalysisRequest {
    std::string ticker;
    std::set<SectionId> excluded_sections;
    std::optional<std::pair<int, int>> year_range;
    bool run_relative = false;
    std::vector<std::string> peer_tickers;
    /// Regrade even when matching grades are stored.
    bool force = false;

    /// Normalises tickers and throws Validation on a bad request. Runs
    /// before any fetching.
    void validate();

    /// {"ticker", "excluded_sections": [...], "year_range": {"from","to"} |
    ///  [from,to], "run_relative", "peer_tickers": [...], "force"}
    static AnalysisRequest from_json(const nlohmann::json& body);
    nlohmann::json to_json() const;
};

/// Digest of (ticker, sorted exclusions, year range, relative settings,
/// provider id, prompt template versions). `force` is not part of it.
std::string request_fingerprint(const AnalysisRequest& request, const std::string& provider_id);

/// Reuse key for one filing's grades.
std::string grade_fingerprint(const std::string& ticker, int fiscal_year, const std::string& accession,
                              const std::set<SectionId>& excluded, const std::string& provider_id);

enum class Stage { Queued, Fetching, Parsing, Grading, Comparing, Done, Failed };

std::string_view to_string(Stage s) noexcept;

/// Overall progress for a fraction through a stage; bands are fixed so the
/// value never decreases as stages advance.
double overall_progress(Stage stage, double fraction) noexcept;

/// Error raised inside the pipeline, tagged with the stage it came from.
class StageError : public Error {
public:
    StageError(Stage stage, const Error& cause);
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct PipelineDeps {
    edgar::EdgarClient& client;
    grader::CompletionProvider& provider;
    analytics::DataStore& store;
};

struct PipelineOptions {
    std::size_t grade_parallelism = 4;
    int rotations = 3;
    std::vector<SectionId> comparison_sections = comparator::default_comparison_sections();
    /// Writes the report CSVs here when set.
    std::optional<std::filesystem::path> report_dir;
    std::string job_id;
    /// Optional transcript files (NDJSON).
    std::optional<std::filesystem::path> grade_transcript;
    std::optional<std::filesystem::path> comparison_transcript;
};

using ProgressFn = std::function<void(Stage, double fraction, const std::string& detail)>;

struct LoadedFiling {
    edgar::FilingRef ref;
    parser::ParsedFiling parsed;
};

struct PipelineResult {
    std::string ticker;
    std::vector<int> years;
    /// Grades backing this run (fresh and reused), one per slot.
    std::vector<grader::GradeResult> grades;
    std::size_t provider_grades = 0;
    std::size_t reused_grades = 0;
    std::vector<comparator::ComparisonResult> comparisons;
    std::vector<comparator::SkippedComparison> skipped_comparisons;
    std::vector<std::string> warnings;
    analytics::AnalysisRecord record;
    std::optional<analytics::ReportFiles> report;
};

/// Lists, fetches and parses every 10-K of `ticker` inside the year range.
/// Per-filing failures become warnings; throws when nothing usable remains.
std::vector<LoadedFiling> load_filings(edgar::EdgarClient& client, const std::string& ticker,
                                       const std::optional<std::pair<int, int>>& years,
                                       std::vector<std::string>& warnings, const ProgressFn& progress = {});

struct CompareSettings {
    std::vector<SectionId> sections = comparator::default_comparison_sections();
    int rotations = 3;
    bool force = false;
    std::optional<std::filesystem::path> transcript;
};

struct CompareRun {
    std::vector<comparator::ComparisonResult> results;
    std::vector<comparator::SkippedComparison> skipped;
    std::size_t reused = 0;
};

/// Three-way comparisons over already loaded filings (company = ticker),
/// reusing stored results with a matching fingerprint and persisting new
/// ones under each entrant.
CompareRun compare_companies(const std::array<std::string, 3>& tickers, const std::vector<LoadedFiling>& filings,
                             PipelineDeps deps, const CompareSettings& settings, std::vector<std::string>& warnings,
                             const ProgressFn& progress = {});

/// fetch -> parse -> grade (-> compare) -> persist.
PipelineResult run_pipeline(AnalysisRequest request, PipelineDeps deps, const PipelineOptions& options = {},
                            const ProgressFn& progress = {});

/// Latest stored grade per (year, dimension, mode) slot.
std::vector<grader::GradeResult> latest_grades(const analytics::Dataset& ds);

}  // namespace tenk::service
