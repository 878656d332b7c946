#include <doctest.h>

#include <chrono>
#include <regex>
#include <thread>

#include <json.hpp>

#include "support.hpp"
#include "tenk/edgar/edgar_client.hpp"
#include "tenk/edgar/rate_limiter.hpp"
#include "tenk/fs.hpp"

using namespace tenk;
using namespace tenk::edgar;
using tenk::testing::MockTransport;
using tenk::testing::TempDir;
using json = nlohmann::json;

namespace {

const char* kTickers = R"({"0":{"cik_str":320193,"ticker":"AAPL","title":"Apple Inc."},
                           "1":{"cik_str":85535,"ticker":"RGLD","title":"ROYAL GOLD INC"}})";

json submissions(std::vector<std::string> forms) {
    json recent = {{"accessionNumber", json::array()},
                   {"filingDate", json::array()},
                   {"form", json::array()},
                   {"primaryDocument", json::array()},
                   {"reportDate", json::array()}};
    for (std::size_t i = 0; i < forms.size(); ++i) {
        recent["accessionNumber"].push_back("0000085535-2" + std::to_string(i) + "-00000" + std::to_string(i));
        recent["filingDate"].push_back("202" + std::to_string(i) + "-02-15");
        recent["form"].push_back(forms[i]);
        recent["primaryDocument"].push_back("doc" + std::to_string(i) + ".htm");
        recent["reportDate"].push_back("");
    }
    return {{"cik", "85535"}, {"fiscalYearEnd", "1231"}, {"filings", {{"recent", recent}, {"files", json::array()}}}};
}

struct Harness {
    TempDir dir{"edgar"};
    std::shared_ptr<MockTransport> transport;
    std::unique_ptr<EdgarClient> client;

    explicit Harness(MockTransport::Handler handler) {
        transport = std::make_shared<MockTransport>(std::move(handler));
        FetchPolicy p;
        p.cache_dir = dir.path();
        p.user_agent = "Research bot ops@example.org";
        client = std::make_unique<EdgarClient>(p, transport, std::make_shared<RateLimiter>(10.0), EdgarEndpoints{},
                                               testing::no_wait_retry());
    }
};

HttpResponse ok(std::string body, std::string type = "application/json") {
    return HttpResponse{200, std::move(body), {{"Content-Type", type}}};
}

MockTransport::Handler standard_routes(json subs) {
    return [subs](const HttpRequest& r) {
        if (r.url.find("company_tickers.json") != std::string::npos) return ok(kTickers);
        if (r.url.find("/submissions/CIK0000085535.json") != std::string::npos) return ok(subs.dump());
        if (r.url.find("/Archives/edgar/data/85535/") != std::string::npos && r.url.find("/doc") != std::string::npos) {
            return ok("<html><body>doc</body></html>", "text/html; charset=utf-8");
        }
        return HttpResponse{404, "", {}};
    };
}

}  // namespace

TEST_CASE("value types validate their grammar") {
    CHECK(Ticker::parse(" aapl ").symbol() == "AAPL");
    CHECK(Ticker::parse("BRK-B").symbol() == "BRK-B");
    CHECK_THROWS_AS(Ticker::parse("AAPL1"), Error);
    CHECK_THROWS_AS(Ticker::parse(""), Error);
    CHECK(Cik::parse("320193").value() == "0000320193");
    CHECK(Cik::parse("CIK0000320193").unpadded() == "320193");
    CHECK_THROWS_AS(Cik::parse("0"), Error);
    auto a = AccessionNumber::parse("000032019323000106");
    CHECK(a.dashed() == "0000320193-23-000106");
    CHECK(AccessionNumber::parse(a.dashed()).dashless() == "000032019323000106");
    CHECK_THROWS_AS(AccessionNumber::parse("0000320193-23-00010"), Error);
}

TEST_CASE("fetch policy requires a contact unless offline") {
    FetchPolicy p;
    p.user_agent = "no contact";
    CHECK_THROWS_AS(p.validate(), Error);
    p.user_agent = "me@example.com";
    p.validate();
    p.max_requests_per_second = 11;
    CHECK_THROWS_AS(p.validate(), Error);
    p.max_requests_per_second = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    FetchPolicy off;
    off.offline_mode = true;
    off.validate();
}

TEST_CASE("resolve_cik normalises case and caches the map") {
    Harness h(standard_routes(submissions({"10-K"})));
    auto cik = h.client->resolve_cik(Ticker::parse("aapl"));
    CHECK(cik.value() == "0000320193");
    CHECK(std::regex_match(cik.value(), std::regex(R"(^\d{10}$)")));
    CHECK(h.client->resolve_cik(Ticker::parse("AAPL")) == cik);
    CHECK(h.transport->count() == 1);
    try {
        h.client->resolve_cik(Ticker::parse("ZZZZNOTREAL"));
        FAIL("expected UnknownTicker");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownTicker);
    }
    CHECK(std::filesystem::exists(h.dir / "company_tickers.json"));
}

TEST_CASE("list_10k_filings filters forms and sorts newest first") {
    Harness h(standard_routes(submissions({"10-K", "10-K/A", "8-K", "10-K", "10-Q"})));
    auto cik = Cik::parse("85535");
    auto refs = h.client->list_10k_filings(cik);
    REQUIRE(refs.size() == 2);
    for (const auto& r : refs) CHECK(r.form_type == "10-K");
    CHECK(std::chrono::sys_days{refs[0].filing_date} > std::chrono::sys_days{refs[1].filing_date});
    auto with_amend = h.client->list_10k_filings(cik, ListOptions{true});
    CHECK(with_amend.size() == 3);
}

TEST_CASE("amendment plus original yields exactly one entry") {
    Harness h(standard_routes(submissions({"10-K/A", "10-K"})));
    CHECK(h.client->list_10k_filings(Cik::parse("85535")).size() == 1);
}

TEST_CASE("no 10-K filings gives an empty list") {
    Harness h(standard_routes(submissions({"8-K", "10-Q"})));
    CHECK(h.client->list_10k_filings(Cik::parse("85535")).empty());
}

TEST_CASE("submissions errors") {
    SUBCASE("unknown cik") {
        Harness h([](const HttpRequest&) { return HttpResponse{404, "", {}}; });
        try {
            h.client->list_10k_filings(Cik::parse("999"));
            FAIL("expected UnknownCik");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownCik);
        }
    }
    SUBCASE("missing arrays") {
        Harness h([](const HttpRequest&) { return ok(R"({"filings":{"recent":{"form":[]}}})"); });
        try {
            h.client->list_10k_filings(Cik::parse("85535"));
            FAIL("expected MalformedResponse");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedResponse);
        }
    }
    SUBCASE("rate limited upstream") {
        Harness h([](const HttpRequest&) { return HttpResponse{429, "", {}}; });
        try {
            h.client->resolve_cik(Ticker::parse("AAPL"));
            FAIL("expected RateLimitExceeded");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RateLimitExceeded);
        }
        CHECK(h.transport->count() == 1);
    }
}

TEST_CASE("supplementary submission pages are followed") {
    auto main = submissions({"10-K"});
    main["filings"]["files"] = json::array({json{{"name", "CIK0000085535-submissions-001.json"}}});
    auto extra = submissions({"10-K", "10-K"})["filings"]["recent"];
    extra["accessionNumber"] = json::array({"0000085535-15-000001", "0000085535-14-000001"});
    extra["filingDate"] = json::array({"2015-02-15", "2014-02-15"});
    Harness h([&](const HttpRequest& r) {
        if (r.url.find("submissions-001") != std::string::npos) return ok(extra.dump());
        return standard_routes(main)(r);
    });
    auto refs = h.client->list_10k_filings(Cik::parse("85535"));
    CHECK(refs.size() == 3);
    CHECK(edgar::format_date(refs.back().filing_date) == "2014-02-15");
}

TEST_CASE("fetch_document caches and is idempotent") {
    Harness h(standard_routes(submissions({"10-K"})));
    auto refs = h.client->list_10k_filings(Cik::parse("85535"));
    REQUIRE(refs.size() == 1);
    auto before = h.transport->count();
    auto cold = h.client->fetch_document(refs[0]);
    CHECK_FALSE(cold.from_cache);
    CHECK(cold.media_type == "text/html");
    CHECK(h.transport->count() == before + 1);
    CHECK(h.transport->requests().back().url ==
          "https://www.sec.gov/Archives/edgar/data/85535/000008553520000000/doc0.htm");
    auto warm = h.client->fetch_document(refs[0]);
    CHECK(warm.from_cache);
    CHECK(warm.bytes == cold.bytes);
    CHECK(h.transport->count() == before + 1);
    CHECK(std::filesystem::exists(h.dir / "0000085535" / "000008553520000000" / "doc0.htm"));

    auto fake = refs[0];
    fake.accession = AccessionNumber::parse("0000085535-99-999999");
    fake.primary_document = "nothing.htm";
    try {
        h.client->fetch_document(fake);
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
}

TEST_CASE("every request carries the configured user agent") {
    Harness h(standard_routes(submissions({"10-K", "10-K"})));
    auto cik = h.client->resolve_cik(Ticker::parse("RGLD"));
    for (const auto& ref : h.client->list_10k_filings(cik)) h.client->fetch_document(ref);
    auto reqs = h.transport->requests();
    CHECK(reqs.size() == 4);
    for (const auto& r : reqs) CHECK(r.headers.at("User-Agent") == "Research bot ops@example.org");
    CHECK(h.client->network_requests() == 4);
}

TEST_CASE("transient failures are retried with backoff") {
    int calls = 0;
    std::vector<std::chrono::milliseconds> slept;
    auto transport = std::make_shared<MockTransport>([&](const HttpRequest&) {
        if (++calls < 3) return HttpResponse{503, "", {}};
        return ok(kTickers);
    });
    TempDir dir;
    FetchPolicy p;
    p.cache_dir = dir.path();
    p.user_agent = "x@example.com";
    RetryPolicy retry;
    retry.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d); };
    EdgarClient client(p, transport, std::make_shared<RateLimiter>(10.0), {}, retry);
    CHECK(client.resolve_cik(Ticker::parse("AAPL")).value() == "0000320193");
    CHECK(calls == 3);
    CHECK(slept == std::vector<std::chrono::milliseconds>{std::chrono::seconds(1), std::chrono::seconds(2)});

    SUBCASE("network errors exhaust the schedule") {
        int n = 0;
        auto failing = std::make_shared<MockTransport>([&](const HttpRequest&) -> HttpResponse {
            ++n;
            throw Error(ErrorCode::NetworkError, "connection refused");
        });
        TempDir d2;
        p.cache_dir = d2.path();
        EdgarClient c2(p, failing, std::make_shared<RateLimiter>(10.0), {}, testing::no_wait_retry());
        CHECK_THROWS_AS(c2.resolve_cik(Ticker::parse("AAPL")), Error);
        CHECK(n == 4);
    }
}

TEST_CASE("offline mode never touches the network") {
    TempDir dir;
    testing::copy_fixture_cache(dir / "cache");
    auto transport = std::make_shared<MockTransport>();
    auto policy = testing::offline_policy(dir / "cache");
    EdgarClient client(policy, transport);
    auto cik = client.resolve_cik(Ticker::parse("RGLD"));
    auto refs = client.list_10k_filings(cik);
    REQUIRE_FALSE(refs.empty());
    auto doc = client.fetch_document(refs[0]);
    CHECK(doc.from_cache);
    CHECK(doc.bytes.size() > 1000);
    auto missing = refs[0];
    missing.accession = AccessionNumber::parse("0000085535-01-000001");
    try {
        client.fetch_document(missing);
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
    try {
        client.list_10k_filings(Cik::parse("1"));
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
    CHECK(transport->count() == 0);
    CHECK(client.network_requests() == 0);
}

TEST_CASE("lookup_cached does not fetch") {
    TempDir dir;
    auto transport = std::make_shared<MockTransport>();
    FetchPolicy p;
    p.cache_dir = dir.path();
    p.user_agent = "x@example.com";
    EdgarClient empty(p, transport);
    CHECK_FALSE(empty.lookup_cached(Ticker::parse("AAPL")).has_value());
    CHECK(transport->count() == 0);

    auto fixture = testing::offline_client(testing::fixture_cache());
    CHECK(fixture.lookup_cached(Ticker::parse("AAPL"))->value() == "0000320193");
    CHECK_THROWS_AS(fixture.lookup_cached(Ticker::parse("ZZZZNOTREAL")), Error);
}

TEST_CASE("filing ref validation rejects future dates and escaping paths") {
    FilingRef ref{Cik::parse("1"), AccessionNumber::parse("0000000001-24-000001"), "10-K",
                  parse_date("2024-01-01"), "doc.htm", std::nullopt, std::nullopt};
    ref.validate();
    auto future = ref;
    future.filing_date = parse_date("2999-01-01");
    CHECK_THROWS_AS(future.validate(), Error);
    auto escape = ref;
    escape.primary_document = "../../etc/passwd";
    CHECK_THROWS_AS(escape.validate(), Error);
}

TEST_CASE("rate limiter: one request is released immediately") {
    RateLimiter limiter(10.0);
    auto t0 = RateLimiter::Clock::now();
    limiter.acquire();
    CHECK(RateLimiter::Clock::now() - t0 < std::chrono::milliseconds(50));
}

TEST_CASE("rate limiter: limit 1/s spaces releases by a second") {
    RateLimiter limiter(1.0);
    std::vector<RateLimiter::Clock::time_point> t;
    for (int i = 0; i < 3; ++i) t.push_back(limiter.acquire());
    CHECK(t[1] - t[0] >= std::chrono::seconds(1));
    CHECK(t[2] - t[1] >= std::chrono::seconds(1));
}

TEST_CASE("rate limiter: sliding window holds across threads") {
    RateLimiter limiter(10.0);
    std::mutex m;
    std::vector<RateLimiter::Clock::time_point> released;
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&] {
            for (int j = 0; j < 6; ++j) {
                auto t = limiter.acquire();
                std::lock_guard lock(m);
                released.push_back(t);
            }
        });
    }
    for (auto& th : threads) th.join();
    std::sort(released.begin(), released.end());
    REQUIRE(released.size() == 24);
    // Any 11 consecutive releases span at least one second.
    for (std::size_t i = 10; i < released.size(); ++i) {
        CHECK(released[i] - released[i - 10] >= std::chrono::seconds(1));
    }
}
