#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tenk/comparator/comparator.hpp"
#include "tenk/grader/grading.hpp"

namespace tenk::analytics {

inline constexpr int kSchemaVersion = 1;

struct StoredGrade {
    grader::GradeResult result;
    /// Inputs digest the grade was produced from; reuse key.
    std::string fingerprint;
    std::string provider_id;
    bool operator==(const StoredGrade&) const = default;
};

struct StoredComparison {
    comparator::ComparisonResult result;
    std::string fingerprint;
    std::string provider_id;
    bool operator==(const StoredComparison&) const = default;
};

/// One completed pipeline run.
struct AnalysisRecord {
    std::string job_id;
    std::string fingerprint;
    std::string ticker;
    std::vector<std::string> excluded_sections;
    std::optional<int> year_from;
    std::optional<int> year_to;
    std::vector<std::string> peers;
    std::string provider_id;
    std::string generated_at;
    std::vector<int> years;
    std::vector<std::string> warnings;
    bool operator==(const AnalysisRecord&) const = default;
};

struct Meta {
    int schema_version = kSchemaVersion;
    std::string generated_at;
    std::string provider_id;
};

struct Dataset {
    std::vector<StoredGrade> grades;
    std::vector<StoredComparison> comparisons;
    std::vector<AnalysisRecord> analyses;
    std::optional<Meta> meta;
};

/// Versioned, append-only layout:
///
///   {root}/{ticker}/grades.ndjson
///   {root}/{ticker}/comparisons.ndjson
///   {root}/{ticker}/analyses.ndjson
///   {root}/{ticker}/meta.json
///
/// Each line is {"schema_version", "kind", "data", "checksum"} with the
/// checksum a sha256 over data's canonical dump. Appends from one DataStore
/// are serialised; a comparison is written under each entrant.
class DataStore {
public:
    explicit DataStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    void append_grades(const std::string& ticker, const std::vector<StoredGrade>& grades);
    void append_comparisons(const std::vector<StoredComparison>& comparisons);
    void append_analysis(const AnalysisRecord& record);
    void write_meta(const std::string& ticker, const Meta& meta);

    /// Missing ticker directory: empty dataset. Throws StorageCorrupt with
    /// file and line number on a bad record.
    Dataset load(const std::string& ticker) const;
    std::vector<std::string> tickers() const;

private:
    std::filesystem::path dir(const std::string& ticker) const;

    std::filesystem::path root_;
    mutable std::mutex mutex_;
};

nlohmann::json to_json(const grader::GradeResult& g);
grader::GradeResult grade_from_json(const nlohmann::json& j);
nlohmann::json to_json(const comparator::ComparisonResult& c);
comparator::ComparisonResult comparison_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnalysisRecord& a);
AnalysisRecord analysis_from_json(const nlohmann::json& j);

std::string utc_timestamp();

}  // namespace tenk::analytics
