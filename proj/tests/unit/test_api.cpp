#include <doctest.h>

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"
#include "tenk/service/api_server.hpp"

using namespace tenk;
using namespace tenk::service;
using json = nlohmann::json;

namespace {

// Server on a free port over the fixture cache and a stub provider.
struct Live {
    testing::TempDir dir{"api"};
    edgar::EdgarClient client = testing::offline_client(testing::fixture_cache());
    analytics::DataStore store{dir / "data"};
    grader::DeterministicStub stub{"1.25"};
    JobManager jobs{[this](const AnalysisRequest& r, const std::string& id, const ProgressFn& p) {
                        PipelineOptions o;
                        o.job_id = id;
                        return run_pipeline(r, {client, stub, store}, o, p);
                    },
                    1};
    std::unique_ptr<ApiServer> server;
    std::thread thread;
    int port = 0;

    Live() {
        Settings s;
        s.static_dir = dir / "no-ui";
        server = std::make_unique<ApiServer>(ServiceContext{s, client, stub, store, jobs});
        port = server->bind("127.0.0.1", 0);
        thread = std::thread([this] { server->run(); });
    }
    ~Live() {
        server->stop();
        thread.join();
    }
    httplib::Client http() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(30, 0);
        return c;
    }
    json wait_done(const std::string& id) {
        auto c = http();
        json last;
        for (int i = 0; i < 600; ++i) {
            auto r = c.Get("/api/analyses/" + id);
            REQUIRE(r);
            last = json::parse(r->body);
            if (last["status"] == "Done" || last["status"] == "Failed") break;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        return last;
    }
};

json body(const httplib::Result& r) {
    REQUIRE(r);
    return json::parse(r->body);
}

}  // namespace

TEST_CASE("POST analyses -> poll -> ratings") {
    Live live;
    auto c = live.http();
    auto r = c.Post("/api/analyses", R"({"ticker":"rgld"})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 202);
    auto j = body(r);
    std::string id = j["job_id"];
    CHECK(r->get_header_value("Location") == "/api/analyses/" + id);
    CHECK(j["status"] == "Queued");

    double last_progress = 0;
    json snap;
    for (int i = 0; i < 600; ++i) {
        snap = body(c.Get("/api/analyses/" + id));
        CHECK(snap["progress"].get<double>() >= last_progress);
        last_progress = snap["progress"];
        if (snap["status"] == "Done" || snap["status"] == "Failed") break;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    REQUIRE(snap["status"] == "Done");
    CHECK(snap["progress"] == 1.0);

    auto ratings = c.Get("/api/companies/RGLD/ratings");
    REQUIRE(ratings);
    CHECK(ratings->status == 200);
    CHECK(ratings->get_header_value("Content-Type").find("application/json") == 0);
    auto rj = json::parse(ratings->body);
    CHECK(rj.contains("schema_version"));
    REQUIRE(rj["series"].size() == 4);
    for (const auto& s : rj["series"]) {
        REQUIRE(s["points"].size() == 1);
        for (const auto& p : s["points"]) {
            CHECK(p["year"] == 2023);
            CHECK(p["score"].get<double>() >= 0.0);
            CHECK(p["score"].get<double>() <= 2.0);
        }
    }

    auto props = body(c.Get("/api/companies/RGLD/proportions"));
    REQUIRE(props["snapshots"].size() == 1);
    double sum = 0;
    for (const auto& [k, v] : props["snapshots"][0]["proportions"].items()) sum += v.get<double>();
    CHECK(sum == doctest::Approx(1.0));

    auto corr = body(c.Get("/api/companies/RGLD/correlations"));
    CHECK(corr["scope"] == "company");
    auto all = body(c.Get("/api/companies/RGLD/correlations?scope=all"));
    CHECK(all["scope"] == "all");
    CHECK(all["companies"] == json::array({"RGLD"}));
    CHECK(c.Get("/api/companies/RGLD/correlations?scope=galaxy")->status == 400);
}

TEST_CASE("API error statuses") {
    Live live;
    auto c = live.http();
    auto expect = [&](const httplib::Result& r, int status, const std::string& code) {
        REQUIRE(r);
        CHECK(r->status == status);
        auto j = json::parse(r->body);
        CHECK(j["error"]["code"] == code);
        CHECK_FALSE(j["error"]["message"].get<std::string>().empty());
    };
    expect(c.Post("/api/analyses", "not json", "application/json"), 400, "Validation");
    expect(c.Post("/api/analyses", R"({"ticker":"RGLD","excluded_sections":["NOPE"]})", "application/json"), 400,
           "Validation");
    json all_excluded = {{"ticker", "RGLD"}, {"excluded_sections", json::array()}};
    for (const auto& s : parser::all_sections()) all_excluded["excluded_sections"].push_back(s.key);
    expect(c.Post("/api/analyses", all_excluded.dump(), "application/json"), 400, "Validation");
    expect(c.Post("/api/analyses", R"({"ticker":"ZZZZNOTREAL"})", "application/json"), 404, "UnknownTicker");
    expect(c.Post("/api/analyses", R"({"ticker":"QQQQ"})", "application/json"), 404, "UnknownTicker");
    expect(c.Get("/api/analyses/does-not-exist"), 404, "NotFound");
    expect(c.Get("/api/companies/RGLD/ratings"), 404, "NotFound");
    expect(c.Get("/api/companies/bad%20ticker!/ratings"), 400, "Validation");
    expect(c.Get("/api/comparisons?tickers=AAA,BBB"), 400, "Validation");
    expect(c.Get("/api/comparisons?tickers=AAA,AAA,BBB"), 400, "Validation");
    expect(c.Get("/api/comparisons?tickers=AAA,BBB,CCC"), 404, "NotFound");
    CHECK(live.stub.calls() == 0);
}

TEST_CASE("API conflict, sections and comparisons") {
    Live live;
    auto c = live.http();
    std::string req = R"({"ticker":"RGLD","run_relative":true,"peer_tickers":["AAPL","IBM"]})";
    auto first = c.Post("/api/analyses", req, "application/json");
    REQUIRE(first);
    REQUIRE(first->status == 202);
    auto id = body(first)["job_id"].get<std::string>();
    auto second = c.Post("/api/analyses", req, "application/json");
    REQUIRE(second);
    auto snap = live.jobs.get(id);
    if (snap->status != Stage::Done && snap->status != Stage::Failed) {
        // Still in flight when the duplicate arrived.
        CHECK(second->status == 409);
        CHECK(body(second)["job_id"] == id);
    }
    auto done = live.wait_done(id);
    REQUIRE(done["status"] == "Done");
    live.jobs.wait_idle();

    auto cmp = c.Get("/api/comparisons?tickers=IBM,RGLD,AAPL");
    REQUIRE(cmp);
    CHECK(cmp->status == 200);
    auto cj = json::parse(cmp->body);
    CHECK_FALSE(cj["comparisons"].empty());
    CHECK(cj["year_alignment"] == "fiscal_year");

    auto sections = body(c.Get("/api/sections"));
    CHECK(sections["sections"].size() == parser::all_sections().size());
    CHECK(sections["sections"][0]["key"] == "ITEM_1_BUSINESS");

    auto root = c.Get("/");
    REQUIRE(root);
    CHECK(root->status == 200);
}
