#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tenk/error.hpp"
#include "tenk/grader/criteria.hpp"
#include "tenk/grader/prompt.hpp"
#include "tenk/grader/provider.hpp"
#include "tenk/parser/element.hpp"

namespace tenk::grader {

using SectionSet = std::set<parser::SectionId>;

inline constexpr std::size_t kPromptReserveTokens = 2000;
inline constexpr int kScoreMaxTokens = 16;
inline constexpr int kScoreRetries = 2;

struct NarrativeChunk {
    std::string text;
    std::size_t estimated_tokens = 0;
    /// Ordinals of the elements (or element pieces) in this chunk.
    std::vector<std::size_t> ordinals;
};

/// Narrative text of the sections not excluded, packed in document order
/// into chunks of at most token_budget - reserve estimated tokens, where
/// reserve = min(2000, token_budget / 2). Elements are joined by a blank
/// line; an element larger than the limit is split at sentence boundaries.
/// Throws InvalidArgument for token_budget < 1024 and NoNarrativeText when
/// nothing is left to grade.
std::vector<NarrativeChunk> chunk_narrative(const parser::SectionedFiling& filing, const SectionSet& excluded,
                                            std::size_t token_budget);

std::size_t chunk_token_limit(std::size_t token_budget);

/// First `\d+(\.\d+)?` literal, clamped to [0, 2]. Throws UnparseableScore.
double parse_score(std::string_view completion);

struct GradeResult {
    std::string company;
    int fiscal_year = 0;
    Dimension dimension = Dimension::Confidence;
    GraderMode mode = GraderMode::Normal;
    double score = 0.0;
    std::vector<double> chunk_scores;
    /// Single chunk: hash of its final prompt. Several: hash over the
    /// per-chunk hashes joined by newlines.
    std::string prompt_hash;
    /// Final completion of each scored chunk, newline-joined.
    std::string raw_completion;
    /// Indices of chunks dropped after exhausting retries.
    std::vector<std::size_t> failed_chunks;

    bool operator==(const GradeResult&) const = default;
};

/// One provider exchange.
struct GradeTranscriptRecord {
    std::string company;
    int fiscal_year = 0;
    Dimension dimension = Dimension::Confidence;
    GraderMode mode = GraderMode::Normal;
    std::size_t chunk_index = 0;
    int attempt = 0;
    std::string prompt_hash;
    std::string raw_completion;
    std::optional<double> score;
    std::string error;
};

using GradeTranscriptSink = std::function<void(const GradeTranscriptRecord&)>;

struct GradeOptions {
    const PromptTemplate* prompt_template = nullptr;  // null: standard
    /// 0: the provider's context window.
    std::size_t token_budget = 0;
    int retries = kScoreRetries;
    GradeTranscriptSink transcript;
    /// Concurrent (dimension, mode) pairs in grade_filing.
    std::size_t parallelism = 4;
    /// Restricts grade_filing to these pairs; empty means all eight.
    std::vector<std::pair<Dimension, GraderMode>> pairs;
    /// Called after each finished pair with (done, total).
    std::function<void(std::size_t, std::size_t)> on_progress;
};

inline constexpr std::string_view kScoreReminder =
    "Reminder: answer only with a decimal number between 0 and 2, with no other text.";

GradeResult grade_dimension(const parser::SectionedFiling& filing, const Criterion& criterion, GraderMode mode,
                            CompletionProvider& provider, const SectionSet& excluded, const GradeOptions& options = {});

struct GradeFailure {
    Dimension dimension;
    GraderMode mode;
    ErrorCode code;
    std::string message;
};

struct FilingGrades {
    /// Successful pairs, in dimension-major, normal-before-strict order.
    std::vector<GradeResult> results;
    std::vector<GradeFailure> failures;
};

/// All 4 x 2 (dimension, mode) pairs; a failing pair is recorded and does
/// not affect its siblings. NoNarrativeText is raised once up front.
FilingGrades grade_filing(const parser::SectionedFiling& filing, CompletionProvider& provider,
                          const SectionSet& excluded, const GradeOptions& options = {});

/// Appends transcript records as NDJSON; safe to share between threads.
class TranscriptWriter {
public:
    explicit TranscriptWriter(std::filesystem::path file);
    void write(const GradeTranscriptRecord& record);
    GradeTranscriptSink sink();

private:
    std::filesystem::path file_;
    std::mutex mutex_;
};

}  // namespace tenk::grader
