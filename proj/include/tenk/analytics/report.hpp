#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tenk/analytics/analytics.hpp"
#include "tenk/comparator/comparator.hpp"

namespace tenk::analytics {

/// company,year,dimension,mode,score  (mode: normal|strict|average)
std::string ratings_csv(const std::vector<GradeResult>& results);
/// company,year,dimension,fraction
std::string proportions_csv(const std::vector<PrioritySnapshot>& snapshots);
/// dim_a,dim_b,r  (empty r when undefined)
std::string correlations_csv(const CorrelationMatrix& m);
/// company,section,wins
std::string wins_csv(const comparator::WinTable& table);

struct ReportFiles {
    std::filesystem::path ratings, proportions, correlations, wins;
};

/// Writes the four CSVs into `dir`.
ReportFiles write_report(const std::filesystem::path& dir, const std::vector<GradeResult>& results,
                         const std::vector<comparator::ComparisonResult>& comparisons);

/// Shortest round-trip decimal for a score.
std::string format_number(double v);

}  // namespace tenk::analytics
