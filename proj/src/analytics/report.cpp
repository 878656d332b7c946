#include "tenk/analytics/report.hpp"

#include <charconv>
#include <map>

#include "tenk/csv.hpp"
#include "tenk/fs.hpp"

namespace tenk::analytics {

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string ratings_csv(const std::vector<GradeResult>& results) {
    std::string out = csv::row({"company", "year", "dimension", "mode", "score"});
    for (const auto& r : results) {
        out += csv::row({r.company, std::to_string(r.fiscal_year), std::string(grader::to_string(r.dimension)),
                         std::string(grader::to_string(r.mode)), format_number(r.score)});
    }
    for (const auto& a : average_all(results)) {
        out += csv::row({a.company, std::to_string(a.fiscal_year), std::string(grader::to_string(a.dimension)),
                         "average", format_number(a.score)});
    }
    return out;
}

std::string proportions_csv(const std::vector<PrioritySnapshot>& snapshots) {
    std::string out = csv::row({"company", "year", "dimension", "fraction"});
    for (const auto& s : snapshots) {
        for (auto d : grader::kDimensions) {
            out += csv::row({s.company, std::to_string(s.fiscal_year), std::string(grader::to_string(d)),
                             format_number(s.proportions[static_cast<std::size_t>(d)])});
        }
    }
    return out;
}

std::string correlations_csv(const CorrelationMatrix& m) {
    std::string out = csv::row({"dim_a", "dim_b", "r"});
    for (auto a : grader::kDimensions) {
        for (auto b : grader::kDimensions) {
            const auto& r = m.at(a, b);
            out += csv::row({std::string(grader::to_string(a)), std::string(grader::to_string(b)),
                             r ? format_number(*r) : std::string()});
        }
    }
    return out;
}

std::string wins_csv(const comparator::WinTable& table) {
    std::string out = csv::row({"company", "section", "wins"});
    for (const auto& [key, n] : table.wins) {
        out += csv::row({key.first, std::string(parser::section_info(key.second).key), std::to_string(n)});
    }
    return out;
}

ReportFiles write_report(const std::filesystem::path& dir, const std::vector<GradeResult>& results,
                         const std::vector<comparator::ComparisonResult>& comparisons) {
    auto averaged = average_all(results);
    auto series = rating_series(averaged);
    std::vector<PrioritySnapshot> snapshots;
    std::map<std::string, std::vector<RatingSeries>> by_company;
    for (auto& s : series) by_company[s.company].push_back(s);
    for (const auto& [company, four] : by_company) {
        auto snaps = priority_proportions(four);
        snapshots.insert(snapshots.end(), snaps.begin(), snaps.end());
    }
    ReportFiles files{dir / "ratings.csv", dir / "proportions.csv", dir / "correlations.csv", dir / "wins.csv"};
    fs::atomic_write(files.ratings, ratings_csv(results), ErrorCode::CacheWriteError);
    fs::atomic_write(files.proportions, proportions_csv(snapshots), ErrorCode::CacheWriteError);
    fs::atomic_write(files.correlations, correlations_csv(correlation_matrix(averaged)), ErrorCode::CacheWriteError);
    fs::atomic_write(files.wins, wins_csv(comparator::tally_wins(comparisons)), ErrorCode::CacheWriteError);
    return files;
}

}  // namespace tenk::analytics
