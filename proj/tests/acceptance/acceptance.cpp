// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Everything runs offline against the fixture cache and stubs.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"
#include "tenk/analytics/analytics.hpp"
#include "tenk/analytics/report.hpp"
#include "tenk/analytics/store.hpp"
#include "tenk/comparator/comparator.hpp"
#include "tenk/csv.hpp"
#include "tenk/error.hpp"
#include "tenk/grader/grading.hpp"
#include "tenk/grader/provider.hpp"
#include "tenk/parser/export.hpp"
#include "tenk/service/pipeline.hpp"
#include "tenk/text.hpp"

using namespace tenk;
using Clock = std::chrono::steady_clock;
using grader::Dimension;
using grader::GraderMode;
using parser::SectionId;

namespace {

// Thrown by check() to abort one criterion with a reason.
struct Fail {
    std::string why;
};

void check(bool ok, const std::string& why) {
    if (!ok) throw Fail{why};
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Criterion {
    std::string name;
    std::function<std::string()> body;  // returns a short detail on success
};

std::vector<service::LoadedFiling> fixture_filing(edgar::EdgarClient& client, const std::string& ticker) {
    std::vector<std::string> warnings;
    return service::load_filings(client, ticker, std::pair{2023, 2023}, warnings);
}

std::string table2() {
    auto t0 = Clock::now();
    auto client = testing::offline_client(testing::fixture_cache());
    auto loaded = fixture_filing(client, "RGLD");
    check(loaded.size() == 1, "expected one RGLD filing for 2023");
    auto rows = csv::parse(parser::export_csv(loaded[0].parsed.filing, true));
    const std::vector<std::string> expected = {
        "Payable Metal: Ounces or pounds of metal in concentrate payable to the operator after deducting a "
        "percentage of metal in concentrate paid to a third-party smelter pursuant to smelting contracts.",
        "Reserve: That part of a mineral deposit that could be economically and legally extracted or produced at "
        "the time of the reserve determination.",
        "Royalty: The right to receive a percentage or other denomination of mineral production from a resource "
        "extraction operation.",
    };
    std::size_t found = 0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < rows.size() && found < expected.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() == 3 && r[0] == "BUSINESS" && r[1] == "NarrativeText" &&
            text::normalize_whitespace(r[2]) == expected[found]) {
            if (found == 0) at = i;
            ++found;
        }
    }
    check(found == expected.size(), "matched " + std::to_string(found) + "/3 rows in order");
    double s = seconds_since(t0);
    check(s < 10.0, "took " + std::to_string(s) + " s");
    return "rows from #" + std::to_string(at) + ", " + std::to_string(s) + " s";
}

std::string section_coverage() {
    auto t0 = Clock::now();
    auto client = testing::offline_client(testing::fixture_cache());
    std::ostringstream detail;
    for (const char* ticker : {"RGLD", "IBM", "AAPL"}) {
        auto loaded = fixture_filing(client, ticker);
        check(loaded.size() == 1, std::string("expected one filing for ") + ticker);
        const auto& filing = loaded[0].parsed.filing;
        std::set<SectionId> items;
        for (const auto& e : filing.elements) {
            if (e.section != SectionId::Unknown) items.insert(e.section);
        }
        double unknown = parser::unknown_narrative_share(filing);
        check(items.size() >= 8, std::string(ticker) + ": " + std::to_string(items.size()) + " items");
        check(unknown <= 0.20, std::string(ticker) + ": unknown share " + std::to_string(unknown));
        detail << ticker << " " << items.size() << " items/" << std::round(unknown * 1000) / 10 << "% unknown; ";
    }
    double s = seconds_since(t0);
    check(s < 30.0, "took " + std::to_string(s) + " s");
    detail << s << " s";
    return detail.str();
}

std::string score_fuzz() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20240101);
    const std::vector<std::string> adversarial = {
        "score: 99/2", "\xe2\x88\x92" "1", "-1", "2.0001", "1e9", "NaN", "inf", "-0", "0.", ".5", "2.", "99999999999999999999999999",
        "00000000000000000002.5", "Score: -2", "1,5", "0x10", "   ", "", std::string("\0" "3", 2), "1.999999999999999999999",
        "score=2.00000000000000000001", "+3", "\xff\xfe" "7", "---", "1.2.3", "\xd9\xa3",  // Arabic-Indic three
    };
    auto in_range = [](const std::string& s) {
        try {
            double v = grader::parse_score(s);
            return v >= 0.0 && v <= 2.0;
        } catch (const Error& e) {
            return e.code() == ErrorCode::UnparseableScore;
        }
    };
    std::size_t cases = 0;
    for (const auto& s : adversarial) {
        check(in_range(s), "adversarial input out of range");
        ++cases;
    }
    const std::string alphabet = "0123456789.-+eE /:,score \t\n";
    for (; cases < 10000; ++cases) {
        std::string s;
        auto len = rng() % 40;
        for (std::size_t i = 0; i < len; ++i) {
            s += rng() % 3 ? alphabet[rng() % alphabet.size()] : static_cast<char>(rng() % 256);
        }
        check(in_range(s), "random input out of range");
    }
    double secs = seconds_since(t0);
    check(secs < 5.0, "took " + std::to_string(secs) + " s");
    return std::to_string(cases) + " strings, " + std::to_string(secs) + " s";
}

std::string e2e_stub() {
    auto t0 = Clock::now();
    testing::TempDir dir("accept");
    auto client = testing::offline_client(testing::fixture_cache());
    analytics::DataStore store(dir / "data");

    // Scripted per-(dimension, mode) answers; expected series value is their mean.
    const std::map<Dimension, std::pair<double, double>> scripted = {
        {Dimension::Confidence, {2.0, 1.5}},
        {Dimension::Environment, {1.25, 0.75}},
        {Dimension::Innovation, {0.5, 0.0}},
        {Dimension::People, {1.0, 1.75}},
    };
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& [d, answers] : scripted) {
        auto name = std::string(grader::to_string(d));
        rules.push_back({{"dimension", name}, {"mode", "normal"}, {"answer", analytics::format_number(answers.first)}});
        rules.push_back({{"dimension", name}, {"mode", "strict"}, {"answer", analytics::format_number(answers.second)}});
    }
    auto stub = grader::DeterministicStub::from_json(nlohmann::json{{"rules", rules}}.dump());

    service::AnalysisRequest req;
    req.ticker = "RGLD";
    auto first = service::run_pipeline(req, {client, *stub, store});
    check(first.grades.size() == 8, std::to_string(first.grades.size()) + " grade results");
    std::set<std::pair<Dimension, GraderMode>> slots;
    for (const auto& g : first.grades) slots.insert({g.dimension, g.mode});
    check(slots.size() == 8, "grades do not cover 4 dimensions x 2 modes");
    auto series = analytics::rating_series(analytics::average_all(first.grades));
    check(series.size() == 4, "expected 4 series");
    for (const auto& s : series) {
        auto [n, st] = scripted.at(s.dimension);
        check(s.points.size() == 1, "expected one year per series");
        for (const auto& [year, value] : s.points) {
            check(value == (n + st) / 2, std::string(grader::to_string(s.dimension)) + " = " +
                                             analytics::format_number(value));
        }
    }
    auto calls = stub->calls();
    auto second = service::run_pipeline(req, {client, *stub, store});
    check(stub->calls() == calls, "rerun made " + std::to_string(stub->calls() - calls) + " provider calls");
    check(second.reused_grades == 8, "rerun reused " + std::to_string(second.reused_grades));
    check(client.network_requests() == 0, "network was touched");
    double s = seconds_since(t0);
    check(s < 60.0, "took " + std::to_string(s) + " s");
    return std::to_string(calls) + " calls then 0, " + std::to_string(s) + " s";
}

std::string rotation_fairness() {
    comparator::ComparisonTask task{SectionId::Item7, 2023,
                                    {comparator::Entrant{"AAA", "Plans for alpha."},
                                     comparator::Entrant{"BBB", "Plans for beta."},
                                     comparator::Entrant{"CCC", "Plans for gamma."}}};
    for (const char* letter : {"A", "B", "C"}) {
        grader::DeterministicStub stub(letter);
        auto r = comparator::run_comparison(task, stub);
        check(r.rotations.size() == 3, "expected 3 rotations");
        check(!r.winner.has_value(), std::string("fixed '") + letter + "' produced winner " + r.winner.value_or(""));
    }
    for (const auto& e : task.entrants) {
        auto stub = grader::DeterministicStub::from_json(
            nlohmann::json{{"rules", {{{"contains", {"## Excerpt A"}}, {"track", e.excerpt}}}}}.dump());
        auto r = comparator::run_comparison(task, *stub);
        std::size_t wins = 0;
        for (const auto& rot : r.rotations) wins += rot.chosen == e.ticker;
        check(r.winner == e.ticker && wins == 3, e.ticker + " won " + std::to_string(wins) + "/3");
    }
    return "fixed A/B/C: no winner; tracked entrant 3/3";
}

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::string analytics_oracles() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> pos(1e-6, 2.0);
    double worst_sum = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<analytics::RatingSeries> series;
        for (auto d : grader::kDimensions) series.push_back({"CO", d, {{2020, pos(rng)}, {2021, pos(rng)}}, {}});
        for (const auto& snap : analytics::priority_proportions(series)) {
            double sum = 0;
            for (double p : snap.proportions) sum += p;
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
            check(!snap.degenerate, "positive scores flagged degenerate");
        }
    }
    check(worst_sum <= 1e-9, "proportion sum off by " + std::to_string(worst_sum));

    std::uniform_real_distribution<double> score(0.0, 2.0);
    double worst_r = 0;
    for (int ds = 0; ds < 100; ++ds) {
        std::vector<analytics::AveragedScore> scores;
        std::array<std::vector<double>, 4> cols;
        for (int obs = 0; obs < 20; ++obs) {
            for (auto d : grader::kDimensions) {
                double v = score(rng);
                cols[static_cast<std::size_t>(d)].push_back(v);
                scores.push_back({"CO" + std::to_string(obs % 4), 2000 + obs, d, v, false});
            }
        }
        auto m = analytics::correlation_matrix(scores);
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                check(m.r[a][b].has_value(), "undefined entry");
                check(m.n[a][b] == 20, "wrong observation count");
                worst_r = std::max(worst_r, std::abs(*m.r[a][b] - oracle_pearson(cols[a], cols[b])));
            }
        }
    }
    check(worst_r <= 1e-12, "pearson deviates by " + std::to_string(worst_r));

    std::vector<double> x{0, 1, 2}, y{2, 1, 0};
    auto r = analytics::pearson(x, y);
    check(r.has_value() && *r == -1.0, "(0,1,2) vs (2,1,0) != -1");
    std::ostringstream out;
    out << "max |sum-1| " << worst_sum << ", max |r-oracle| " << worst_r << ", r = -1 exact";
    return out.str();
}

std::string rate_limit() {
    testing::TempDir dir("accept-rl");
    edgar::FetchPolicy policy;
    policy.cache_dir = dir.path();
    policy.user_agent = "tenk-acceptance ops@example.com";
    policy.max_requests_per_second = 10;
    auto transport = std::make_shared<testing::MockTransport>();
    edgar::EdgarClient client(policy, transport);
    auto t0 = Clock::now();
    for (int i = 0; i < 100; ++i) {
        char acc[32];
        std::snprintf(acc, sizeof acc, "0000000001-24-%06d", i + 1);
        edgar::FilingRef ref{edgar::Cik::parse("1"), edgar::AccessionNumber::parse(acc), "10-K",
                             edgar::parse_date("2024-01-01"), "doc.htm", std::nullopt, std::nullopt};
        client.fetch_document(ref);
    }
    double s = seconds_since(t0);
    auto requests = transport->requests();
    check(requests.size() == 100, std::to_string(requests.size()) + " requests sent");
    for (const auto& r : requests) {
        auto ua = r.headers.find("User-Agent");
        check(ua != r.headers.end() && ua->second == policy.user_agent, "request without the user agent");
    }
    check(s >= 9.0 && s <= 12.0, "took " + std::to_string(s) + " s");
    return "100 requests in " + std::to_string(s) + " s";
}

std::string storage_round_trip() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    auto pick = [&](auto n) { return static_cast<std::size_t>(rng() % n); };
    const std::vector<std::string> names = {"AAA", "BBB", "CCC", "DDD", "E.F", "G-H"};
    auto noisy = [&] {
        std::string s;
        static const std::vector<std::string> bits = {"a", "b", "\"", ",", "\n", "\\", "\u00e9", "\U0001F642", " "};
        for (std::size_t i = pick(12); i > 0; --i) s += bits[pick(bits.size())];
        return s;
    };
    for (int c = 0; c < 200; ++c) {
        testing::TempDir dir("accept-store");
        analytics::DataStore store(dir.path());
        auto ticker = names[pick(names.size())];
        std::vector<analytics::StoredGrade> grades;
        for (std::size_t i = pick(10); i > 0; --i) {
            grader::GradeResult g;
            g.company = ticker;
            g.fiscal_year = 2000 + static_cast<int>(pick(25));
            g.dimension = grader::kDimensions[pick(4)];
            g.mode = pick(2) ? GraderMode::Strict : GraderMode::Normal;
            for (std::size_t k = pick(5) + 1; k > 0; --k) g.chunk_scores.push_back(u(rng));
            g.score = u(rng);
            g.prompt_hash = noisy();
            g.raw_completion = noisy();
            if (pick(3) == 0) g.failed_chunks = {pick(4)};
            grades.push_back({g, noisy(), noisy()});
        }
        std::vector<analytics::StoredComparison> comps;
        for (std::size_t i = pick(4); i > 0; --i) {
            comparator::ComparisonResult r;
            r.section = parser::all_sections()[pick(parser::all_sections().size())].id;
            r.fiscal_year = 2000 + static_cast<int>(pick(25));
            r.tickers = {ticker, "ZZ1", "ZZ2"};
            for (std::size_t k = pick(3) + 1; k > 0; --k) {
                comparator::RotationOutcome o;
                o.ordering = {r.tickers[k % 3], r.tickers[(k + 1) % 3], r.tickers[(k + 2) % 3]};
                o.verdict = static_cast<comparator::Verdict>(pick(4));
                if (o.verdict != comparator::Verdict::Inconclusive) o.chosen = o.ordering[static_cast<int>(o.verdict)];
                o.prompt_hash = noisy();
                o.raw_completion = noisy();
                o.error = pick(2) ? noisy() : "";
                r.rotations.push_back(o);
            }
            if (pick(2)) r.winner = r.tickers[pick(3)];
            comps.push_back({r, noisy(), noisy()});
        }
        if (!grades.empty()) store.append_grades(ticker, grades);
        if (!comps.empty()) store.append_comparisons(comps);
        auto ds = store.load(ticker);
        check(ds.grades == grades, "case " + std::to_string(c) + ": grades differ");
        check(ds.comparisons == comps, "case " + std::to_string(c) + ": comparisons differ");
    }
    return "200 cases value-identical";
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"table2_reproduction", table2},
        {"section_coverage", section_coverage},
        {"score_parser_fuzz", score_fuzz},
        {"e2e_stub_pipeline", e2e_stub},
        {"rotation_fairness", rotation_fairness},
        {"analytics_oracles", analytics_oracles},
        {"rate_limit_compliance", rate_limit},
        {"storage_round_trip", storage_round_trip},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            detail = c.body();
            ok = true;
        } catch (const Fail& f) {
            detail = f.why;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        failed += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << c.name << " - " << detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
