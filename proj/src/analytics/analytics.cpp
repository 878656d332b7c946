#include "tenk/analytics/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "tenk/error.hpp"

namespace tenk::analytics {

namespace {

std::size_t idx(Dimension d) { return static_cast<std::size_t>(d); }

}  // namespace

double average_modes(const GradeResult& normal, const GradeResult& strict) {
    if (normal.company != strict.company || normal.fiscal_year != strict.fiscal_year ||
        normal.dimension != strict.dimension) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cannot average " + normal.company + "/" + std::to_string(normal.fiscal_year) + "/" +
                        std::string(to_string(normal.dimension)) + " with " + strict.company + "/" +
                        std::to_string(strict.fiscal_year) + "/" + std::string(to_string(strict.dimension)));
    }
    if (normal.mode != GraderMode::Normal || strict.mode != GraderMode::Strict) {
        throw Error(ErrorCode::DimensionMismatch, "average_modes needs one normal and one strict result");
    }
    return (normal.score + strict.score) / 2.0;
}

AveragedScore average_modes(const std::optional<GradeResult>& normal, const std::optional<GradeResult>& strict) {
    if (normal && strict) {
        return {normal->company, normal->fiscal_year, normal->dimension, average_modes(*normal, *strict), false};
    }
    const auto* one = normal ? &*normal : strict ? &*strict : nullptr;
    if (!one) throw Error(ErrorCode::InvalidArgument, "average_modes: both modes missing");
    return {one->company, one->fiscal_year, one->dimension, one->score, true};
}

std::vector<AveragedScore> average_all(const std::vector<GradeResult>& results) {
    using Key = std::tuple<std::string, int, Dimension>;
    std::map<Key, std::pair<std::optional<GradeResult>, std::optional<GradeResult>>> groups;
    for (const auto& r : results) {
        auto& g = groups[{r.company, r.fiscal_year, r.dimension}];
        (r.mode == GraderMode::Normal ? g.first : g.second) = r;
    }
    std::vector<AveragedScore> out;
    out.reserve(groups.size());
    for (const auto& [key, g] : groups) out.push_back(average_modes(g.first, g.second));
    return out;
}

std::vector<RatingSeries> rating_series(const std::vector<AveragedScore>& scores) {
    std::map<std::string, std::array<RatingSeries, 4>> by_company;
    for (const auto& s : scores) {
        auto [it, fresh] = by_company.try_emplace(s.company);
        if (fresh) {
            for (auto d : grader::kDimensions) it->second[idx(d)] = RatingSeries{s.company, d, {}, {}};
        }
        auto& series = it->second[idx(s.dimension)];
        series.points[s.fiscal_year] = s.score;
        if (s.single_mode) {
            series.single_mode_years.insert(s.fiscal_year);
        } else {
            series.single_mode_years.erase(s.fiscal_year);
        }
    }
    std::vector<RatingSeries> out;
    for (auto& [company, four] : by_company) {
        for (auto& s : four) out.push_back(std::move(s));
    }
    return out;
}

std::vector<PrioritySnapshot> priority_proportions(std::span<const RatingSeries> series) {
    if (series.empty()) return {};
    const auto& company = series.front().company;
    std::map<int, std::array<double, 4>> years;
    for (const auto& s : series) {
        if (s.company != company) {
            throw Error(ErrorCode::InvalidArgument, "priority_proportions mixes " + company + " and " + s.company);
        }
        for (const auto& [year, score] : s.points) {
            years[year][idx(s.dimension)] = score;
        }
    }
    std::vector<PrioritySnapshot> out;
    for (const auto& [year, scores] : years) {
        PrioritySnapshot snap{company, year, {}, false};
        double total = scores[0] + scores[1] + scores[2] + scores[3];
        if (total > 0.0) {
            for (std::size_t i = 0; i < 4; ++i) snap.proportions[i] = scores[i] / total;
        } else {
            snap.proportions.fill(0.25);
            snap.degenerate = true;
        }
        out.push_back(snap);
    }
    return out;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "pearson: length mismatch");
    const auto n = xs.size();
    if (n < 3) return std::nullopt;
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(xs) || constant(ys)) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const std::vector<AveragedScore>& scores) {
    std::map<std::pair<std::string, int>, std::array<std::optional<double>, 4>> obs;
    for (const auto& s : scores) obs[{s.company, s.fiscal_year}][idx(s.dimension)] = s.score;

    CorrelationMatrix m;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a; b < 4; ++b) {
            std::vector<double> xs, ys;
            for (const auto& [key, row] : obs) {
                if (row[a] && row[b]) {
                    xs.push_back(*row[a]);
                    ys.push_back(*row[b]);
                }
            }
            std::optional<double> r;
            if (a == b) {
                if (pearson(xs, ys)) r = 1.0;
            } else {
                r = pearson(xs, ys);
            }
            m.r[a][b] = m.r[b][a] = r;
            m.n[a][b] = m.n[b][a] = xs.size();
        }
    }
    return m;
}

Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    auto q = [&](double p) {
        double h = static_cast<double>(values.size() - 1) * p;
        auto lo = static_cast<std::size_t>(std::floor(h));
        if (lo + 1 >= values.size()) return values.back();
        return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
    };
    s.min = values.front();
    s.max = values.back();
    s.q1 = q(0.25);
    s.median = q(0.5);
    s.q3 = q(0.75);
    return s;
}

std::map<Dimension, DimensionRange> rating_ranges(const std::vector<GradeResult>& results) {
    std::map<Dimension, std::array<std::vector<double>, 2>> per_mode;
    for (const auto& r : results) per_mode[r.dimension][r.mode == GraderMode::Strict ? 1 : 0].push_back(r.score);
    std::map<Dimension, std::vector<double>> averaged;
    for (const auto& a : average_all(results)) averaged[a.dimension].push_back(a.score);

    std::map<Dimension, DimensionRange> out;
    for (auto d : grader::kDimensions) {
        DimensionRange range;
        range.combined = summarize(averaged[d]);
        range.normal = summarize(per_mode[d][0]);
        range.strict = summarize(per_mode[d][1]);
        out[d] = range;
    }
    return out;
}

}  // namespace tenk::analytics
