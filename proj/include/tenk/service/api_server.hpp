#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "tenk/analytics/store.hpp"
#include "tenk/edgar/edgar_client.hpp"
#include "tenk/grader/provider.hpp"
#include "tenk/service/jobs.hpp"
#include "tenk/service/settings.hpp"

namespace tenk::service {

struct ServiceContext {
    Settings settings;
    edgar::EdgarClient& client;
    grader::CompletionProvider& provider;
    analytics::DataStore& store;
    JobManager& jobs;
};

/// Read-side payloads, shared by the HTTP API and `tenk report --json`.
/// Each throws NotFound when the store holds nothing for the ticker.
nlohmann::json ratings_payload(const analytics::DataStore& store, const std::string& ticker);
nlohmann::json proportions_payload(const analytics::DataStore& store, const std::string& ticker);
/// scope "company" uses the ticker's own grades; "all" pools every ticker.
nlohmann::json correlations_payload(const analytics::DataStore& store, const std::string& ticker,
                                    const std::string& scope);
nlohmann::json comparisons_payload(const analytics::DataStore& store, const std::array<std::string, 3>& tickers);
nlohmann::json sections_payload();

/// Every JSON body carries schema_version.
///
///   POST /api/analyses                         202 | 400 | 404 | 409
///   GET  /api/analyses/{id}                    200 | 404
///   GET  /api/companies/{ticker}/ratings       200 | 400 | 404
///   GET  /api/companies/{ticker}/proportions   200 | 400 | 404
///   GET  /api/companies/{ticker}/correlations  200 | 400 | 404   (?scope=all)
///   GET  /api/comparisons?tickers=a,b,c        200 | 400 | 404
///   GET  /api/sections                         200
///   GET  /                                     static UI
class ApiServer {
public:
    explicit ApiServer(ServiceContext context);
    ~ApiServer();

    /// Binds without serving; port 0 picks a free port. Returns the port.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tenk::service
