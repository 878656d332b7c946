#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tenk/grader/grading.hpp"

namespace tenk::analytics {

using grader::Dimension;
using grader::GradeResult;
using grader::GraderMode;

struct AveragedScore {
    std::string company;
    int fiscal_year = 0;
    Dimension dimension = Dimension::Confidence;
    double score = 0.0;
    /// Only one of the two graders produced a score.
    bool single_mode = false;
};

/// (normal + strict) / 2. Throws DimensionMismatch unless both results
/// share company, year and dimension and carry the right modes.
double average_modes(const GradeResult& normal, const GradeResult& strict);

/// As above, tolerating one missing side (flagged single_mode). Throws
/// InvalidArgument when both are missing.
AveragedScore average_modes(const std::optional<GradeResult>& normal, const std::optional<GradeResult>& strict);

/// Average every (company, year, dimension) group; with duplicate results
/// for a slot the last one wins.
std::vector<AveragedScore> average_all(const std::vector<GradeResult>& results);

struct RatingSeries {
    std::string company;
    Dimension dimension = Dimension::Confidence;
    std::map<int, double> points;
    std::set<int> single_mode_years;
    bool operator==(const RatingSeries&) const = default;
};

/// Four series per company (dimension order), possibly with empty points.
std::vector<RatingSeries> rating_series(const std::vector<AveragedScore>& scores);

struct PrioritySnapshot {
    std::string company;
    int fiscal_year = 0;
    std::array<double, 4> proportions{};
    bool degenerate = false;
};

/// Score share per dimension for every year present in any series.
/// Throws InvalidArgument if the series mix companies.
std::vector<PrioritySnapshot> priority_proportions(std::span<const RatingSeries> series);

/// Pearson r via mean-centred sums. Undefined (nullopt) with fewer than 3
/// pairs or a constant side.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

struct CorrelationMatrix {
    std::array<std::array<std::optional<double>, 4>, 4> r{};
    /// Paired observations behind each entry.
    std::array<std::array<std::size_t, 4>, 4> n{};

    const std::optional<double>& at(Dimension a, Dimension b) const {
        return r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
};

/// Observations are (company, year) keys; every company and year is pooled.
CorrelationMatrix correlation_matrix(const std::vector<AveragedScore>& scores);

struct Summary {
    std::size_t count = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    bool empty() const noexcept { return count == 0; }
};

/// Order statistics with linear-interpolation quartiles (Hyndman-Fan type 7).
Summary summarize(std::vector<double> values);

struct DimensionRange {
    Summary combined;  // over mode-averaged scores
    Summary normal;
    Summary strict;
};

std::map<Dimension, DimensionRange> rating_ranges(const std::vector<GradeResult>& results);

}  // namespace tenk::analytics
