#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tenk/comparator/comparator.hpp"
#include "tenk/error.hpp"
#include "tenk/grader/provider.hpp"
#include "tenk/text.hpp"

using namespace tenk;
using namespace tenk::comparator;
using grader::DeterministicStub;
using parser::ElementType;

namespace {

ComparisonTask task_xyz() {
    return ComparisonTask{SectionId::Item7, 2023,
                          {Entrant{"XXX", "Excerpt of x about growth plans."},
                           Entrant{"YYY", "Excerpt of y about cost control."},
                           Entrant{"ZZZ", "Excerpt of z about new markets."}}};
}

std::string block(const std::string& prompt, char slot) {
    auto head = std::string("## Excerpt ") + slot + "\n";
    auto at = prompt.find(head);
    REQUIRE(at != std::string::npos);
    auto start = at + head.size();
    auto end = prompt.find("\n\n## ", start);
    return prompt.substr(start, end - start);
}

}  // namespace

TEST_CASE("comparison prompt slots") {
    auto p = build_comparison_prompt("x", "y", "z");
    CHECK(block(p, 'A') == "x");
    CHECK(block(p, 'B') == "y");
    CHECK(block(p, 'C') == "z");
    CHECK(p.find("Do not focus on the grammar; instead, focus on the overall future plan and robust explainability.") !=
          std::string::npos);
    auto rotated = build_comparison_prompt("y", "z", "x");
    CHECK(block(rotated, 'A') == "y");
    CHECK(block(rotated, 'C') == "x");
    // Only slot contents differ: same length for a permutation of equal-length excerpts.
    CHECK(rotated.size() == p.size());
}

TEST_CASE("parse_verdict") {
    CHECK(parse_verdict("B") == Verdict::B);
    CHECK(parse_verdict("The answer is C because it is clear") == Verdict::C);
    CHECK(parse_verdict("all are equal") == Verdict::Inconclusive);
    CHECK(parse_verdict("excerpt a") == Verdict::A);
    CHECK(parse_verdict("\"B\".") == Verdict::B);
    CHECK(parse_verdict("ABC") == Verdict::Inconclusive);
    CHECK(parse_verdict("") == Verdict::Inconclusive);
    CHECK(parse_verdict("B_side then c") == Verdict::C);
    std::mt19937 rng(9);
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        for (std::size_t n = rng() % 20; n > 0; --n) s += static_cast<char>(rng() % 256);
        (void)parse_verdict(s);
    }
}

TEST_CASE("rotation fairness: fixed position preference never wins") {
    for (const char* letter : {"A", "B", "C"}) {
        DeterministicStub stub(letter);
        auto r = run_comparison(task_xyz(), stub);
        REQUIRE(r.rotations.size() == 3);
        CHECK_FALSE(r.winner.has_value());
        std::set<std::string> chosen;
        for (const auto& rot : r.rotations) chosen.insert(*rot.chosen);
        CHECK(chosen.size() == 3);
    }
}

TEST_CASE("rotation ordering is cyclic and a bijection") {
    DeterministicStub stub("A");
    auto r = run_comparison(task_xyz(), stub);
    using O = std::array<std::string, 3>;
    CHECK(r.rotations[0].ordering == O{"XXX", "YYY", "ZZZ"});
    CHECK(r.rotations[1].ordering == O{"YYY", "ZZZ", "XXX"});
    CHECK(r.rotations[2].ordering == O{"ZZZ", "XXX", "YYY"});
    for (const auto& rot : r.rotations) {
        std::set<std::string> s(rot.ordering.begin(), rot.ordering.end());
        CHECK(s.size() == 3);
        CHECK(*rot.chosen == rot.ordering[0]);
    }
}

TEST_CASE("consistent preference for one entrant wins 3/3") {
    auto script = R"({"rules":[{"contains":["## Excerpt A"],"track":"about new markets"}]})";
    auto stub = DeterministicStub::from_json(script);
    auto r = run_comparison(task_xyz(), *stub);
    CHECK(r.winner == std::optional<std::string>("ZZZ"));
    for (const auto& rot : r.rotations) CHECK(rot.chosen == std::optional<std::string>("ZZZ"));
}

TEST_CASE("inconclusive rotations do not count towards a majority") {
    auto stub = DeterministicStub::sequence({"A", "A", "unclear"});
    auto r = run_comparison(task_xyz(), *stub);
    CHECK(r.rotations[0].chosen == std::optional<std::string>("XXX"));
    CHECK(r.rotations[1].chosen == std::optional<std::string>("YYY"));
    CHECK(r.rotations[2].verdict == Verdict::Inconclusive);
    CHECK_FALSE(r.rotations[2].chosen.has_value());
    CHECK_FALSE(r.winner.has_value());

    // X in slot A, then X in slot C, then garbage: 2 of 3 is a majority.
    auto two = DeterministicStub::sequence({"A", "C", "?"});
    CHECK(run_comparison(task_xyz(), *two).winner == std::optional<std::string>("XXX"));
}

TEST_CASE("single-shot mode") {
    DeterministicStub stub("B");
    CompareOptions opts;
    opts.rotations = 1;
    auto r = run_comparison(task_xyz(), stub, opts);
    REQUIRE(r.rotations.size() == 1);
    CHECK(r.winner == std::optional<std::string>("YYY"));
}

TEST_CASE("errors") {
    auto t = task_xyz();
    t.entrants[1].excerpt.clear();
    CHECK_THROWS_AS(t.validate(), Error);
    auto dup = task_xyz();
    dup.entrants[2].ticker = "XXX";
    CHECK_THROWS_AS(dup.validate(), Error);

    auto failing = DeterministicStub::from_json(R"({"rules":[{"contains":["Excerpt"],"fail":true}]})");
    try {
        run_comparison(task_xyz(), *failing);
        FAIL("expected ProviderFailure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProviderFailure);
    }
}

TEST_CASE("excerpts are truncated to a third of the context") {
    CHECK(excerpt_token_budget(128000) == 42000);
    CHECK(excerpt_token_budget(8000) == 2000);
    std::string big;
    for (int i = 0; i < 500; ++i) big += "This sentence has some words in it. ";
    auto t = task_xyz();
    t.entrants[0].excerpt = big;
    std::string seen;
    auto stub = DeterministicStub::from_function([&](const std::string& p) {
        if (seen.empty()) seen = p;
        return std::string("A");
    });
    stub->set_context_window(5000);
    run_comparison(t, *stub);
    auto a = block(seen, 'A');
    CHECK(text::estimate_tokens(a) <= excerpt_token_budget(5000));
    CHECK(big.rfind(a, 0) == 0);
    CHECK(a.back() == '.');
}

TEST_CASE("transcript records every rotation") {
    std::vector<ComparisonTranscriptRecord> log;
    DeterministicStub stub("C");
    CompareOptions opts;
    opts.transcript = [&](const ComparisonTranscriptRecord& r) { log.push_back(r); };
    run_comparison(task_xyz(), stub, opts);
    REQUIRE(log.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(log[i].rotation == i);
        CHECK(log[i].verdict == Verdict::C);
        CHECK(log[i].chosen == log[i].ordering[2]);
        CHECK(log[i].raw_completion == "C");
    }
}

TEST_CASE("planning aligns on fiscal year and skips missing entrants") {
    auto filing = [](std::string co, int year, std::vector<SectionId> sections) {
        parser::SectionedFiling f{co, year, {}};
        for (auto s : sections) {
            f.elements.push_back({f.elements.size(), ElementType::NarrativeText, co + " text for section.", s});
        }
        return f;
    };
    std::vector<parser::SectionedFiling> filings{
        filing("AAA", 2023, {SectionId::Item1, SectionId::Item7}),
        filing("BBB", 2023, {SectionId::Item1, SectionId::Item7}),
        filing("CCC", 2023, {SectionId::Item1}),
        filing("AAA", 2022, {SectionId::Item1}),
    };
    auto plan = plan_comparisons({"AAA", "BBB", "CCC"}, filings, {SectionId::Item1, SectionId::Item7});
    REQUIRE(plan.tasks.size() == 1);
    CHECK(plan.tasks[0].section == SectionId::Item1);
    CHECK(plan.tasks[0].fiscal_year == 2023);
    CHECK(plan.tasks[0].entrants[2].ticker == "CCC");
    CHECK(plan.tasks[0].entrants[0].excerpt == "AAA text for section.");
    // 2022: both sections lack BBB and CCC (and AAA has no Item 7); 2023: Item 7 lacks CCC.
    REQUIRE(plan.skipped.size() == 3);
    using Missing = std::vector<std::string>;
    std::map<std::pair<int, SectionId>, Missing> skipped;
    for (const auto& s : plan.skipped) skipped[{s.fiscal_year, s.section}] = s.missing;
    CHECK(skipped.at({2022, SectionId::Item1}) == Missing{"BBB", "CCC"});
    CHECK(skipped.at({2022, SectionId::Item7}) == Missing{"AAA", "BBB", "CCC"});
    CHECK(skipped.at({2023, SectionId::Item7}) == Missing{"CCC"});
    CHECK(default_comparison_sections() ==
          std::vector<SectionId>{SectionId::Item1, SectionId::Item1A, SectionId::Item7, SectionId::Item7A});
}

TEST_CASE("tally_wins") {
    CHECK(tally_wins({}).wins.empty());
    CHECK(tally_wins({}).inconclusive == 0);

    std::vector<ComparisonResult> six(6);
    for (auto& r : six) {
        r.section = SectionId::Item1;
        r.winner = "X";
    }
    CHECK(tally_wins(six).at("X", SectionId::Item1) == 6);

    std::vector<ComparisonResult> three(3);
    three[0].winner = "X";
    three[1].winner = "X";
    three[1].section = SectionId::Item7;
    auto t = tally_wins(three);
    CHECK(t.totals.at("X") == 2);
    CHECK(t.inconclusive == 1);
    std::size_t sum = 0;
    for (const auto& [k, v] : t.wins) sum += v;
    CHECK(sum + t.inconclusive == three.size());
    CHECK(t.at("Y", SectionId::Item1) == 0);
}
