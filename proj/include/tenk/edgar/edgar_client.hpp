#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tenk/edgar/filing_cache.hpp"
#include "tenk/error.hpp"
#include "tenk/edgar/rate_limiter.hpp"
#include "tenk/edgar/types.hpp"
#include "tenk/http_transport.hpp"

namespace tenk::edgar {

struct EdgarEndpoints {
    std::string tickers_url = "https://www.sec.gov/files/company_tickers.json";
    std::string submissions_base = "https://data.sec.gov/submissions/";
    std::string archives_base = "https://www.sec.gov/Archives/edgar/data/";
};

/// Transient failures (connection errors, 5xx) are retried after each delay
/// in `backoff`, so the default makes at most four attempts.
struct RetryPolicy {
    std::vector<std::chrono::milliseconds> backoff{std::chrono::seconds(1), std::chrono::seconds(2),
                                                   std::chrono::seconds(4)};
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to std::this_thread::sleep_for
};

struct ListOptions {
    bool include_amendments = false;
};

struct FetchedDocument {
    std::string bytes;
    std::string media_type;
    bool from_cache = false;
};

struct CompanyInfo {
    Cik cik;
    std::string title;
};

class EdgarClient {
public:
    EdgarClient(FetchPolicy policy, std::shared_ptr<HttpTransport> transport,
                std::shared_ptr<RateLimiter> limiter = nullptr, EdgarEndpoints endpoints = {},
                RetryPolicy retry = {});

    /// Ticker -> zero-padded CIK via the company ticker map.
    Cik resolve_cik(const Ticker& ticker);

    /// Lookup against an already cached ticker map only; never touches the
    /// network. Empty when no map is cached; throws UnknownTicker when the
    /// map is cached and lacks the ticker.
    std::optional<Cik> lookup_cached(const Ticker& ticker);

    /// Every filing of form type "10-K" (plus "10-K/A" on request), newest
    /// first, including supplementary submission pages.
    std::vector<FilingRef> list_10k_filings(const Cik& cik, ListOptions options = {});

    /// Primary document bytes; served from cache when present.
    FetchedDocument fetch_document(const FilingRef& ref);

    const FetchPolicy& policy() const noexcept { return policy_; }
    const FilingCache& cache() const noexcept { return cache_; }
    std::size_t network_requests() const noexcept { return network_requests_.load(); }

private:
    HttpResponse get(const std::string& url);
    std::string metadata_document(const std::filesystem::path& cache_path, const std::string& url,
                                  ErrorCode not_found_code, const std::string& what);
    const std::map<std::string, CompanyInfo>& ticker_map(bool allow_network);

    FetchPolicy policy_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<RateLimiter> limiter_;
    EdgarEndpoints endpoints_;
    RetryPolicy retry_;
    FilingCache cache_;
    std::atomic<std::size_t> network_requests_{0};

    std::mutex map_mutex_;
    std::optional<std::map<std::string, CompanyInfo>> tickers_;
};

/// Parses the company ticker map document.
std::map<std::string, CompanyInfo> parse_ticker_map(const std::string& body);

/// Parsed submissions document: filing rows plus supplementary page names.
struct SubmissionsPage {
    std::vector<FilingRef> filings;
    std::vector<std::string> supplementary_pages;
};

/// `body` is either the primary submissions document (arrays under
/// filings.recent) or a supplementary page (arrays at top level).
SubmissionsPage parse_submissions(const std::string& body, const Cik& cik);

}  // namespace tenk::edgar
