#include "tenk/service/api_server.hpp"

#include <map>
#include <set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "tenk/analytics/analytics.hpp"
#include "tenk/parser/sections.hpp"
#include "tenk/text.hpp"

namespace tenk::service {

using json = nlohmann::json;
using analytics::kSchemaVersion;

namespace {

json with_schema(json body) {
    body["schema_version"] = kSchemaVersion;
    return body;
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownTicker:
        case ErrorCode::UnknownCik:
        case ErrorCode::NotFound:
            return 404;
        case ErrorCode::Validation:
        case ErrorCode::InvalidArgument:
            return 400;
        default:
            return 500;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(with_schema(body).dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e, const std::string& stage = "") {
    json err = {{"code", to_string(e.code())}, {"message", e.what()}};
    if (!stage.empty()) err["stage"] = stage;
    send_json(res, status_for(e.code()), {{"error", err}});
}

std::string checked_ticker(const std::string& raw) {
    try {
        return edgar::Ticker::parse(raw).symbol();
    } catch (const Error& e) {
        throw Error(ErrorCode::Validation, e.what());
    }
}

std::vector<grader::GradeResult> grades_or_404(const analytics::DataStore& store, const std::string& ticker) {
    auto grades = latest_grades(store.load(ticker));
    if (grades.empty()) throw Error(ErrorCode::NotFound, "no stored ratings for " + ticker);
    return grades;
}

json matrix_json(const analytics::CorrelationMatrix& m) {
    json dims = json::array(), r = json::array(), n = json::array();
    for (auto a : grader::kDimensions) {
        dims.push_back(grader::to_string(a));
        json row = json::array(), nrow = json::array();
        for (auto b : grader::kDimensions) {
            const auto& v = m.at(a, b);
            row.push_back(v ? json(*v) : json(nullptr));
            nrow.push_back(m.n[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
        }
        r.push_back(row);
        n.push_back(nrow);
    }
    return {{"dimensions", dims}, {"r", r}, {"n", n}};
}

}  // namespace

json ratings_payload(const analytics::DataStore& store, const std::string& ticker) {
    auto grades = grades_or_404(store, ticker);
    json series = json::array();
    for (const auto& s : analytics::rating_series(analytics::average_all(grades))) {
        json points = json::array();
        for (const auto& [year, score] : s.points) {
            points.push_back({{"year", year}, {"score", score}, {"single_mode", s.single_mode_years.count(year) > 0}});
        }
        series.push_back({{"dimension", grader::to_string(s.dimension)}, {"points", points}});
    }
    json raw = json::array();
    for (const auto& g : grades) {
        raw.push_back({{"year", g.fiscal_year},
                       {"dimension", grader::to_string(g.dimension)},
                       {"mode", grader::to_string(g.mode)},
                       {"score", g.score}});
    }
    json ranges = json::object();
    for (const auto& [dim, range] : analytics::rating_ranges(grades)) {
        auto summary = [](const analytics::Summary& s) -> json {
            if (s.empty()) return {{"count", 0}};
            return {{"count", s.count}, {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
        };
        ranges[std::string(grader::to_string(dim))] = {
            {"combined", summary(range.combined)}, {"normal", summary(range.normal)}, {"strict", summary(range.strict)}};
    }
    return with_schema({{"company", ticker}, {"series", series}, {"grades", raw}, {"ranges", ranges}});
}

json proportions_payload(const analytics::DataStore& store, const std::string& ticker) {
    auto series = analytics::rating_series(analytics::average_all(grades_or_404(store, ticker)));
    json snaps = json::array();
    for (const auto& p : analytics::priority_proportions(series)) {
        json props = json::object();
        for (auto d : grader::kDimensions) props[std::string(grader::to_string(d))] = p.proportions[static_cast<std::size_t>(d)];
        snaps.push_back({{"year", p.fiscal_year}, {"proportions", props}, {"degenerate", p.degenerate}});
    }
    return with_schema({{"company", ticker}, {"snapshots", snaps}});
}

json correlations_payload(const analytics::DataStore& store, const std::string& ticker, const std::string& scope) {
    std::vector<grader::GradeResult> grades;
    json companies = json::array();
    if (scope == "all") {
        for (const auto& t : store.tickers()) {
            auto g = latest_grades(store.load(t));
            if (g.empty()) continue;
            companies.push_back(t);
            grades.insert(grades.end(), g.begin(), g.end());
        }
        if (grades.empty()) throw Error(ErrorCode::NotFound, "no stored ratings");
    } else if (scope == "company" || scope.empty()) {
        grades = grades_or_404(store, ticker);
        companies.push_back(ticker);
    } else {
        throw Error(ErrorCode::Validation, "scope must be 'company' or 'all'");
    }
    auto m = analytics::correlation_matrix(analytics::average_all(grades));
    return with_schema({{"company", ticker},
                        {"scope", scope.empty() ? "company" : scope},
                        {"companies", companies},
                        {"matrix", matrix_json(m)}});
}

json comparisons_payload(const analytics::DataStore& store, const std::array<std::string, 3>& tickers) {
    std::set<std::string> wanted(tickers.begin(), tickers.end());
    std::map<std::string, comparator::ComparisonResult> latest;  // keyed by section/year
    for (const auto& c : store.load(tickers[0]).comparisons) {
        std::set<std::string> have(c.result.tickers.begin(), c.result.tickers.end());
        if (have != wanted) continue;
        latest[std::string(parser::section_info(c.result.section).key) + "/" + std::to_string(c.result.fiscal_year)] =
            c.result;
    }
    if (latest.empty()) throw Error(ErrorCode::NotFound, "no stored comparisons for " + text::join({tickers.begin(), tickers.end()}, ","));
    std::vector<comparator::ComparisonResult> results;
    json list = json::array();
    for (auto& [key, c] : latest) {
        list.push_back(analytics::to_json(c));
        results.push_back(c);
    }
    auto table = comparator::tally_wins(results);
    json wins = json::array();
    for (const auto& [key, n] : table.wins) {
        wins.push_back({{"company", key.first}, {"section", parser::section_info(key.second).key}, {"wins", n}});
    }
    return with_schema({{"tickers", tickers},
                        {"year_alignment", "fiscal_year"},
                        {"comparisons", list},
                        {"wins", wins},
                        {"totals", table.totals},
                        {"inconclusive", table.inconclusive}});
}

json sections_payload() {
    json list = json::array();
    for (const auto& s : parser::all_sections()) {
        list.push_back({{"key", s.key}, {"item", s.item}, {"display", s.display}});
    }
    return with_schema({{"sections", list}});
}

struct ApiServer::Impl {
    ServiceContext ctx;
    httplib::Server server;

    explicit Impl(ServiceContext c) : ctx(std::move(c)) { routes(); }

    template <class Fn>
    static void guarded(httplib::Response& res, Fn fn) {
        try {
            fn();
        } catch (const StageError& e) {
            send_error(res, e, std::string(to_string(e.stage())));
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const std::exception& e) {
            send_error(res, Error(ErrorCode::ProviderFailure, e.what()));
        }
    }

    void routes() {
        server.Post("/api/analyses", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto body = json::parse(req.body, nullptr, false);
                if (body.is_discarded()) throw Error(ErrorCode::Validation, "request body is not JSON");
                auto request = AnalysisRequest::from_json(body);
                request.validate();
                for (const auto& t : [&] {
                         std::vector<std::string> all{request.ticker};
                         if (request.run_relative) all.insert(all.end(), request.peer_tickers.begin(), request.peer_tickers.end());
                         return all;
                     }()) {
                    ctx.client.lookup_cached(edgar::Ticker::parse(t));  // UnknownTicker -> 404
                }
                auto fingerprint = request_fingerprint(request, ctx.provider.id());
                auto submitted = ctx.jobs.submit(request, fingerprint);
                if (submitted.conflict) {
                    send_json(res, 409, {{"error", {{"code", "Conflict"}, {"message", "identical analysis already in flight"}}},
                                         {"job_id", submitted.id}});
                    return;
                }
                res.set_header("Location", "/api/analyses/" + submitted.id);
                send_json(res, 202, {{"job_id", submitted.id}, {"status", "Queued"}, {"fingerprint", fingerprint}});
            });
        });
        server.Get(R"(/api/analyses/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto job = ctx.jobs.get(req.matches[1]);
                if (!job) throw Error(ErrorCode::NotFound, "unknown job " + std::string(req.matches[1]));
                send_json(res, 200, job->to_json());
            });
        });
        server.Get(R"(/api/companies/([^/]+)/ratings)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, ratings_payload(ctx.store, checked_ticker(req.matches[1]))); });
        });
        server.Get(R"(/api/companies/([^/]+)/proportions)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, proportions_payload(ctx.store, checked_ticker(req.matches[1]))); });
        });
        server.Get(R"(/api/companies/([^/]+)/correlations)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto scope = req.has_param("scope") ? req.get_param_value("scope") : "company";
                send_json(res, 200, correlations_payload(ctx.store, checked_ticker(req.matches[1]), scope));
            });
        });
        server.Get("/api/comparisons", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                if (!req.has_param("tickers")) throw Error(ErrorCode::Validation, "tickers query parameter is required");
                std::vector<std::string> parts;
                std::string raw = req.get_param_value("tickers");
                std::size_t start = 0;
                while (start <= raw.size()) {
                    auto comma = raw.find(',', start);
                    auto piece = raw.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                    if (!piece.empty()) parts.push_back(checked_ticker(piece));
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
                if (parts.size() != 3 || std::set<std::string>(parts.begin(), parts.end()).size() != 3) {
                    throw Error(ErrorCode::Validation, "tickers must name exactly three distinct companies");
                }
                send_json(res, 200, comparisons_payload(ctx.store, {parts[0], parts[1], parts[2]}));
            });
        });
        server.Get("/api/sections", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, sections_payload());
        });

        std::error_code ec;
        if (std::filesystem::is_directory(ctx.settings.static_dir, ec)) {
            server.set_mount_point("/", ctx.settings.static_dir.string());
        } else {
            server.Get("/", [](const httplib::Request&, httplib::Response& res) {
                res.set_content(
                    "<!doctype html><title>tenk</title><p>UI assets not installed. API under <code>/api/</code>.</p>",
                    "text/html");
            });
        }
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                send_error(res, Error(ErrorCode::ProviderFailure, e.what()));
            }
        });
    }
};

ApiServer::ApiServer(ServiceContext context) : impl_(std::make_unique<Impl>(std::move(context))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::NetworkError, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void ApiServer::run() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace tenk::service
