#include <doctest.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <thread>

#include <json.hpp>

#include "support.hpp"
#include "tenk/analytics/analytics.hpp"
#include "tenk/error.hpp"
#include "tenk/fs.hpp"
#include "tenk/grader/provider.hpp"
#include "tenk/service/jobs.hpp"
#include "tenk/service/pipeline.hpp"
#include "tenk/service/settings.hpp"

using namespace tenk;
using namespace tenk::service;
using grader::DeterministicStub;
using json = nlohmann::json;
using parser::SectionId;

namespace {

struct Env {
    testing::TempDir dir{"svc"};
    edgar::EdgarClient client = testing::offline_client(testing::fixture_cache());
    analytics::DataStore store{dir / "data"};
};

AnalysisRequest request_for(const std::string& ticker) {
    AnalysisRequest r;
    r.ticker = ticker;
    return r;
}

}  // namespace

TEST_CASE("request validation") {
    auto r = request_for("rgld");
    r.validate();
    CHECK(r.ticker == "RGLD");

    auto all = request_for("RGLD");
    for (const auto& s : parser::all_sections()) all.excluded_sections.insert(s.id);
    CHECK_THROWS_AS(all.validate(), Error);

    auto years = request_for("RGLD");
    years.year_range = std::pair{2024, 2020};
    CHECK_THROWS_AS(years.validate(), Error);

    auto peers = request_for("RGLD");
    peers.run_relative = true;
    peers.peer_tickers = {"AAPL"};
    CHECK_THROWS_AS(peers.validate(), Error);
    peers.peer_tickers = {"AAPL", "rgld"};
    CHECK_THROWS_AS(peers.validate(), Error);
    peers.peer_tickers = {"aapl", "IBM"};
    peers.validate();
    CHECK(peers.peer_tickers == std::vector<std::string>{"AAPL", "IBM"});

    try {
        request_for("NOT A TICKER!").validate();
        FAIL("expected Validation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Validation);
    }
}

TEST_CASE("request json and fingerprints") {
    auto r = AnalysisRequest::from_json(json::parse(
        R"({"ticker":"RGLD","excluded_sections":["ITEM_1A_RISK_FACTORS","7"],"year_range":[2020,2023]})"));
    CHECK(r.excluded_sections == std::set<SectionId>{SectionId::Item1A, SectionId::Item7});
    CHECK(r.year_range == std::pair{2020, 2023});
    auto again = AnalysisRequest::from_json(r.to_json());
    CHECK(request_fingerprint(again, "p") == request_fingerprint(r, "p"));
    auto forced = r;
    forced.force = true;
    CHECK(request_fingerprint(forced, "p") == request_fingerprint(r, "p"));
    CHECK(request_fingerprint(r, "p") != request_fingerprint(r, "q"));
    auto fewer = r;
    fewer.excluded_sections.erase(SectionId::Item7);
    CHECK(request_fingerprint(fewer, "p") != request_fingerprint(r, "p"));

    CHECK_THROWS_AS(AnalysisRequest::from_json(json::parse(R"({"excluded_sections":[]})")), Error);
    CHECK_THROWS_AS(AnalysisRequest::from_json(json::parse(R"({"ticker":"X","excluded_sections":["BOGUS"]})")), Error);
    CHECK_THROWS_AS(AnalysisRequest::from_json(json::parse(R"([1,2])")), Error);
}

TEST_CASE("stage progress bands") {
    CHECK(overall_progress(Stage::Queued, 0.5) == 0.0);
    CHECK(overall_progress(Stage::Grading, 0.0) == 0.2);
    CHECK(overall_progress(Stage::Grading, 1.0) == doctest::Approx(0.9));
    CHECK(overall_progress(Stage::Done, 0.0) == 1.0);
    double last = 0;
    for (auto s : {Stage::Fetching, Stage::Parsing, Stage::Grading, Stage::Comparing}) {
        for (double f = 0; f <= 1.0; f += 0.25) {
            double p = overall_progress(s, f);
            CHECK(p >= last);
            CHECK(p > 0.0);
            CHECK(p < 1.0);
            last = p;
        }
    }
}

TEST_CASE("pipeline grades a fixture company and reuses on rerun") {
    Env env;
    DeterministicStub stub("1.5");
    std::vector<std::pair<Stage, double>> seen;
    auto progress = [&](Stage s, double f, const std::string&) { seen.emplace_back(s, overall_progress(s, f)); };
    auto first = run_pipeline(request_for("RGLD"), {env.client, stub, env.store}, {}, progress);
    CHECK(first.years == std::vector<int>{2023});
    CHECK(first.grades.size() == 8);
    CHECK(first.provider_grades == 8);
    CHECK(first.reused_grades == 0);
    auto series = analytics::rating_series(analytics::average_all(first.grades));
    CHECK(series.size() == 4);
    for (const auto& s : series) CHECK(s.points == std::map<int, double>{{2023, 1.5}});
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i].second >= seen[i - 1].second);
    CHECK(env.client.network_requests() == 0);

    auto calls = stub.calls();
    CHECK(calls > 0);
    auto second = run_pipeline(request_for("RGLD"), {env.client, stub, env.store});
    CHECK(stub.calls() == calls);
    CHECK(second.reused_grades == 8);
    CHECK(second.grades == first.grades);

    auto forced = request_for("RGLD");
    forced.force = true;
    run_pipeline(forced, {env.client, stub, env.store});
    CHECK(stub.calls() == 2 * calls);

    // A different exclusion set is a different fingerprint.
    auto narrower = request_for("RGLD");
    narrower.excluded_sections = {SectionId::Item1A};
    auto before = stub.calls();
    auto n = run_pipeline(narrower, {env.client, stub, env.store});
    CHECK(n.provider_grades == 8);
    CHECK(stub.calls() > before);

    auto ds = env.store.load("RGLD");
    CHECK(ds.analyses.size() == 4);
    REQUIRE(ds.meta.has_value());
    CHECK(ds.meta->provider_id == stub.id());
    CHECK(latest_grades(ds).size() == 8);
}

TEST_CASE("pipeline rejects bad requests before any work") {
    Env env;
    DeterministicStub stub("1");
    auto all = request_for("RGLD");
    for (const auto& s : parser::all_sections()) all.excluded_sections.insert(s.id);
    CHECK_THROWS_AS(run_pipeline(all, {env.client, stub, env.store}), Error);
    CHECK(stub.calls() == 0);
    CHECK(env.store.tickers().empty());
}

TEST_CASE("pipeline attributes failures to a stage") {
    Env env;
    DeterministicStub stub("1");
    try {
        run_pipeline(request_for("QQQQ"), {env.client, stub, env.store});
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::Fetching);
        CHECK(e.code() == ErrorCode::UnknownTicker);
        CHECK(std::string(e.what()).find("QQQQ") != std::string::npos);
    }
    // Longer than any listed symbol: rejected during validation, same code.
    try {
        run_pipeline(request_for("ZZZZNOTREAL"), {env.client, stub, env.store});
        FAIL("expected UnknownTicker");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownTicker);
    }
    auto early = request_for("RGLD");
    early.year_range = std::pair{2001, 2002};
    CHECK_THROWS_AS(run_pipeline(early, {env.client, stub, env.store}), StageError);

    DeterministicStub banana("banana");
    try {
        run_pipeline(request_for("IBM"), {env.client, banana, env.store});
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::Grading);
    }
}

TEST_CASE("pipeline with relative analysis") {
    Env env;
    auto stub = DeterministicStub::from_json(
        R"({"default":"1","rules":[{"contains":["## Excerpt A"],"track":"Royal Gold"}]})");
    auto req = request_for("RGLD");
    req.run_relative = true;
    req.peer_tickers = {"AAPL", "IBM"};
    auto r = run_pipeline(req, {env.client, *stub, env.store});
    CHECK(r.comparisons.size() + r.skipped_comparisons.size() == 4);
    CHECK_FALSE(r.comparisons.empty());
    for (const auto& c : r.comparisons) {
        CHECK(c.fiscal_year == 2023);
        CHECK(c.rotations.size() == 3);
    }
    for (const char* t : {"RGLD", "AAPL", "IBM"}) CHECK(env.store.load(t).comparisons.size() == r.comparisons.size());

    auto calls = stub->calls();
    auto again = run_pipeline(req, {env.client, *stub, env.store});
    CHECK(stub->calls() == calls);
    CHECK(again.comparisons == r.comparisons);
}

TEST_CASE("compare_companies honours the section list") {
    Env env;
    DeterministicStub stub("B");
    std::vector<std::string> warnings;
    std::vector<LoadedFiling> filings;
    for (const char* t : {"RGLD", "AAPL", "IBM"}) {
        for (auto& l : load_filings(env.client, t, std::nullopt, warnings)) filings.push_back(std::move(l));
    }
    CompareSettings cs;
    cs.sections = {SectionId::Item7};
    cs.rotations = 1;
    auto run = compare_companies({"RGLD", "AAPL", "IBM"}, filings, {env.client, stub, env.store}, cs, warnings);
    REQUIRE(run.results.size() == 1);
    CHECK(run.results[0].section == SectionId::Item7);
    CHECK(run.results[0].winner == std::optional<std::string>("AAPL"));
    auto rerun = compare_companies({"RGLD", "AAPL", "IBM"}, filings, {env.client, stub, env.store}, cs, warnings);
    CHECK(rerun.reused == 1);
}

TEST_CASE("job manager: monotone status, conflicts and failures") {
    std::mutex m;
    std::condition_variable cv;
    bool release = false;
    JobManager jobs(
        [&](const AnalysisRequest& req, const std::string&, const ProgressFn& progress) {
            if (req.ticker == "FAIL") throw StageError(Stage::Parsing, Error(ErrorCode::NoSectionsFound, "bad doc"));
            progress(Stage::Fetching, 0.5, "f");
            progress(Stage::Grading, 0.5, "g");
            progress(Stage::Parsing, 0.9, "late parse report");  // must not move status backwards
            {
                std::unique_lock lock(m);
                cv.wait(lock, [&] { return release; });
            }
            PipelineResult r;
            r.ticker = req.ticker;
            r.years = {2023};
            return r;
        },
        2);
    auto a = jobs.submit(request_for("RGLD"), "fp-1");
    CHECK_FALSE(a.conflict);
    auto dup = jobs.submit(request_for("RGLD"), "fp-1");
    CHECK(dup.conflict);
    CHECK(dup.id == a.id);

    // Wait for the job to reach Grading.
    for (int i = 0; i < 200; ++i) {
        if (jobs.get(a.id)->status == Stage::Grading) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    auto mid = jobs.get(a.id);
    CHECK(mid->status == Stage::Grading);
    CHECK(mid->progress > 0.0);
    CHECK(mid->progress < 1.0);
    {
        std::lock_guard lock(m);
        release = true;
    }
    cv.notify_all();
    auto f = jobs.submit(request_for("FAIL"), "fp-2");
    jobs.wait_idle();

    auto done = jobs.get(a.id);
    CHECK(done->status == Stage::Done);
    CHECK(done->progress == 1.0);
    REQUIRE(done->result.has_value());
    CHECK((*done->result)["years"] == json::array({2023}));
    auto h = jobs.history(a.id);
    CHECK(h.front() == Stage::Queued);
    CHECK(h.back() == Stage::Done);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(static_cast<int>(h[i]) > static_cast<int>(h[i - 1]));

    auto failed = jobs.get(f.id);
    CHECK(failed->status == Stage::Failed);
    CHECK(failed->error_stage == Stage::Parsing);
    CHECK(failed->error_code == ErrorCode::NoSectionsFound);
    auto j = failed->to_json();
    CHECK(j["error"]["stage"] == "Parsing");

    // Finished fingerprints can be resubmitted.
    CHECK_FALSE(jobs.submit(request_for("RGLD"), "fp-1").conflict);
    jobs.wait_idle();
    CHECK_FALSE(jobs.get("nope").has_value());
}

TEST_CASE("provider factory") {
    ProviderSpec spec;
    spec.stub_answer = "0.5";
    auto p = make_provider(spec);
    CHECK(p->complete("x", 16, 0) == "0.5");
    testing::TempDir dir;
    spec.record_file = dir / "rec.ndjson";
    make_provider(spec)->complete("y", 16, 0);
    CHECK(fs::read_lines(dir / "rec.ndjson").size() == 1);
    ProviderSpec replay;
    replay.kind = "replay";
    replay.replay_dir = dir.path();
    CHECK(make_provider(replay)->complete("y", 16, 0) == "0.5");
    ProviderSpec bad;
    bad.kind = "magic";
    CHECK_THROWS_AS(make_provider(bad), Error);
}
