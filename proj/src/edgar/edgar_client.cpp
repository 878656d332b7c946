#include "tenk/edgar/edgar_client.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <json.hpp>
#include <thread>

#include "tenk/error.hpp"

namespace tenk::edgar {

using json = nlohmann::json;

EdgarClient::EdgarClient(FetchPolicy policy, std::shared_ptr<HttpTransport> transport,
                         std::shared_ptr<RateLimiter> limiter, EdgarEndpoints endpoints, RetryPolicy retry)
    : policy_(std::move(policy)),
      transport_(std::move(transport)),
      limiter_(std::move(limiter)),
      endpoints_(std::move(endpoints)),
      retry_(std::move(retry)),
      cache_(policy_.cache_dir) {
    policy_.validate();
    if (!limiter_) limiter_ = shared_rate_limiter(policy_.max_requests_per_second);
    if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!transport_ && !policy_.offline_mode) {
        throw Error(ErrorCode::InvalidArgument, "an HTTP transport is required unless offline");
    }
}

HttpResponse EdgarClient::get(const std::string& url) {
    if (policy_.offline_mode) throw Error(ErrorCode::NotFound, "offline mode, not cached: " + url);

    HttpRequest request;
    request.url = url;
    request.headers["User-Agent"] = policy_.user_agent;
    request.headers["Accept"] = "*/*";

    for (std::size_t attempt = 0;; ++attempt) {
        bool last = attempt >= retry_.backoff.size();
        limiter_->acquire();
        ++network_requests_;
        try {
            auto response = transport_->send(request);
            if (response.status == 429 || response.status == 403) {
                throw Error(ErrorCode::RateLimitExceeded,
                            "EDGAR answered " + std::to_string(response.status) + " for " + url);
            }
            if (response.status >= 500 && !last) {
                spdlog::warn("EDGAR {} for {}, retrying", response.status, url);
                retry_.sleep(retry_.backoff[attempt]);
                continue;
            }
            if (response.status >= 500) {
                throw Error(ErrorCode::NetworkError, "EDGAR answered " + std::to_string(response.status) + " for " + url);
            }
            return response;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NetworkError || last) throw;
            spdlog::warn("{}; retrying", e.what());
            retry_.sleep(retry_.backoff[attempt]);
        }
    }
}

std::string EdgarClient::metadata_document(const std::filesystem::path& cache_path, const std::string& url,
                                           ErrorCode not_found_code, const std::string& what) {
    auto cached = cache_.load_blob(cache_path);
    if (cached && (policy_.offline_mode || cached->age < policy_.metadata_max_age)) return cached->bytes;
    if (policy_.offline_mode) throw Error(ErrorCode::NotFound, "offline mode and no cached " + what);

    auto response = get(url);
    if (response.status == 404) throw Error(not_found_code, what + " not found at " + url);
    if (response.status != 200) {
        throw Error(ErrorCode::NetworkError, "unexpected status " + std::to_string(response.status) + " for " + url);
    }
    cache_.store_blob(cache_path, response.body);
    return response.body;
}

std::map<std::string, CompanyInfo> parse_ticker_map(const std::string& body) {
    auto doc = json::parse(body, nullptr, false);
    if (!doc.is_object()) throw Error(ErrorCode::MalformedResponse, "ticker map is not a JSON object");
    std::map<std::string, CompanyInfo> out;
    for (const auto& [key, row] : doc.items()) {
        if (!row.is_object() || !row.contains("cik_str") || !row.contains("ticker")) {
            throw Error(ErrorCode::MalformedResponse, "ticker map row " + key + " lacks cik_str/ticker");
        }
        std::uint64_t number = row["cik_str"].is_number_unsigned() ? row["cik_str"].get<std::uint64_t>()
                                                                   : std::stoull(row["cik_str"].get<std::string>());
        std::string title = row.contains("title") && row["title"].is_string() ? row["title"].get<std::string>() : "";
        try {
            auto ticker = Ticker::parse(row["ticker"].get<std::string>());
            out.emplace(ticker.symbol(), CompanyInfo{Cik::from_number(number), std::move(title)});
        } catch (const Error&) {
            // Symbols outside the accepted grammar (e.g. with digits) cannot be requested anyway.
        }
    }
    return out;
}

const std::map<std::string, CompanyInfo>& EdgarClient::ticker_map(bool allow_network) {
    std::lock_guard lock(map_mutex_);
    if (tickers_) return *tickers_;
    std::string body;
    if (allow_network) {
        body = metadata_document(cache_.tickers_path(), endpoints_.tickers_url, ErrorCode::NotFound, "ticker map");
    } else {
        auto cached = cache_.load_blob(cache_.tickers_path());
        if (!cached) throw Error(ErrorCode::NotFound, "no cached ticker map");
        body = std::move(cached->bytes);
    }
    tickers_ = parse_ticker_map(body);
    return *tickers_;
}

Cik EdgarClient::resolve_cik(const Ticker& ticker) {
    const auto& map = ticker_map(true);
    auto it = map.find(ticker.symbol());
    if (it == map.end()) throw Error(ErrorCode::UnknownTicker, "ticker " + ticker.symbol() + " is not registered on EDGAR");
    return it->second.cik;
}

std::optional<Cik> EdgarClient::lookup_cached(const Ticker& ticker) {
    try {
        const auto& map = ticker_map(false);
        auto it = map.find(ticker.symbol());
        if (it == map.end()) throw Error(ErrorCode::UnknownTicker, "ticker " + ticker.symbol() + " is not registered on EDGAR");
        return it->second.cik;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotFound) return std::nullopt;
        throw;
    }
}

namespace {

const json& required_array(const json& table, const char* name) {
    if (!table.contains(name) || !table[name].is_array()) {
        throw Error(ErrorCode::MalformedResponse, std::string("submissions document lacks array '") + name + "'");
    }
    return table[name];
}

std::vector<FilingRef> parse_filing_table(const json& table, const Cik& cik) {
    const auto& accession = required_array(table, "accessionNumber");
    const auto& filing_date = required_array(table, "filingDate");
    const auto& form = required_array(table, "form");
    const auto& primary = required_array(table, "primaryDocument");
    const json* report = table.contains("reportDate") && table["reportDate"].is_array() ? &table["reportDate"] : nullptr;
    std::size_t n = accession.size();
    if (filing_date.size() != n || form.size() != n || primary.size() != n || (report && report->size() != n)) {
        throw Error(ErrorCode::MalformedResponse, "submissions arrays have mismatched lengths");
    }
    std::vector<FilingRef> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            FilingRef ref{cik,
                          AccessionNumber::parse(accession[i].get<std::string>()),
                          form[i].get<std::string>(),
                          parse_date(filing_date[i].get<std::string>()),
                          primary[i].get<std::string>(),
                          std::nullopt,
                          std::nullopt};
            if (report && (*report)[i].is_string() && !(*report)[i].get<std::string>().empty()) {
                ref.report_date = parse_date((*report)[i].get<std::string>());
            }
            rows.push_back(std::move(ref));
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedResponse, "submissions row " + std::to_string(i) + ": " + e.what());
        } catch (const json::exception& e) {
            throw Error(ErrorCode::MalformedResponse, "submissions row " + std::to_string(i) + ": " + e.what());
        }
    }
    return rows;
}

}  // namespace

SubmissionsPage parse_submissions(const std::string& body, const Cik& cik) {
    auto doc = json::parse(body, nullptr, false);
    if (!doc.is_object()) throw Error(ErrorCode::MalformedResponse, "submissions document is not a JSON object");
    SubmissionsPage page;
    if (doc.contains("filings")) {
        const auto& filings = doc["filings"];
        if (!filings.is_object() || !filings.contains("recent")) {
            throw Error(ErrorCode::MalformedResponse, "submissions document lacks filings.recent");
        }
        page.filings = parse_filing_table(filings["recent"], cik);
        if (filings.contains("files") && filings["files"].is_array()) {
            for (const auto& file : filings["files"]) {
                if (file.contains("name") && file["name"].is_string()) {
                    page.supplementary_pages.push_back(file["name"].get<std::string>());
                }
            }
        }
    } else {
        page.filings = parse_filing_table(doc, cik);
    }
    return page;
}

std::vector<FilingRef> EdgarClient::list_10k_filings(const Cik& cik, ListOptions options) {
    std::string main_name = "CIK" + cik.value() + ".json";
    auto body = metadata_document(cache_.submissions_path(cik, main_name), endpoints_.submissions_base + main_name,
                                  ErrorCode::UnknownCik, "submissions for CIK " + cik.value());
    auto page = parse_submissions(body, cik);
    std::vector<FilingRef> all = std::move(page.filings);
    for (const auto& name : page.supplementary_pages) {
        auto extra = metadata_document(cache_.submissions_path(cik, name), endpoints_.submissions_base + name,
                                       ErrorCode::MalformedResponse, "supplementary submissions page " + name);
        auto rows = parse_submissions(extra, cik).filings;
        all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }

    std::vector<FilingRef> out;
    for (auto& ref : all) {
        bool wanted = ref.form_type == "10-K" || (options.include_amendments && ref.form_type == "10-K/A");
        if (!wanted) continue;
        try {
            ref.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedResponse, "filing " + ref.accession.dashed() + ": " + e.what());
        }
        out.push_back(std::move(ref));
    }
    std::stable_sort(out.begin(), out.end(), [](const FilingRef& a, const FilingRef& b) {
        return std::chrono::sys_days{a.filing_date} > std::chrono::sys_days{b.filing_date};
    });
    return out;
}

FetchedDocument EdgarClient::fetch_document(const FilingRef& ref) {
    ref.validate();
    if (auto cached = cache_.load_document(ref)) {
        return FetchedDocument{std::move(cached->bytes), std::move(cached->media_type), true};
    }
    if (policy_.offline_mode) {
        throw Error(ErrorCode::NotFound, "offline mode and " + ref.accession.dashed() + " is not cached");
    }
    std::string url = endpoints_.archives_base + ref.cik.unpadded() + "/" + ref.accession.dashless() + "/" +
                      ref.primary_document;
    auto response = get(url);
    if (response.status == 404) throw Error(ErrorCode::NotFound, "no document at " + url);
    if (response.status != 200) {
        throw Error(ErrorCode::NetworkError, "unexpected status " + std::to_string(response.status) + " for " + url);
    }
    auto media_type = response.header("Content-Type");
    if (auto semi = media_type.find(';'); semi != std::string::npos) media_type.resize(semi);
    if (media_type.empty()) media_type = guess_media_type(ref.primary_document);
    cache_.store_document(ref, CachedDocument{response.body, media_type});
    return FetchedDocument{std::move(response.body), std::move(media_type), false};
}

}  // namespace tenk::edgar
