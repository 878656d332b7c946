// tenk: command-line front end for fetching, parsing, grading and comparing
// 10-K filings, and for serving the HTTP API.
//
// Exit codes: 0 success, 1 bad input (usage, validation, unknown ticker),
// 2 runtime failure.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tenk/analytics/report.hpp"
#include "tenk/analytics/store.hpp"
#include "tenk/edgar/edgar_client.hpp"
#include "tenk/error.hpp"
#include "tenk/fs.hpp"
#include "tenk/parser/export.hpp"
#include "tenk/parser/sections.hpp"
#include "tenk/service/api_server.hpp"
#include "tenk/service/jobs.hpp"
#include "tenk/service/pipeline.hpp"
#include "tenk/service/settings.hpp"
#include "tenk/text.hpp"

namespace {

using json = nlohmann::json;
using namespace tenk;

struct Globals {
    bool json_output = false;
    bool verbose = false;
    std::string cache_dir;
    std::string data_dir;
    std::string user_agent;
    bool offline = false;
    service::ProviderSpec provider;
    std::string stub_script, replay_dir, record_file;
};

service::Settings settings_from(const Globals& g) {
    auto s = service::Settings::from_env();
    if (!g.cache_dir.empty()) s.fetch.cache_dir = g.cache_dir;
    if (!g.data_dir.empty()) s.data_dir = g.data_dir;
    if (!g.user_agent.empty()) s.fetch.user_agent = g.user_agent;
    if (g.offline) s.fetch.offline_mode = true;
    return s;
}

service::ProviderSpec provider_from(const Globals& g) {
    auto spec = g.provider;
    if (!g.stub_script.empty()) spec.stub_script = g.stub_script;
    if (!g.replay_dir.empty()) spec.replay_dir = g.replay_dir;
    if (!g.record_file.empty()) spec.record_file = g.record_file;
    return spec;
}

std::unique_ptr<edgar::EdgarClient> make_client(const service::Settings& s) {
    s.fetch.validate();
    return std::make_unique<edgar::EdgarClient>(s.fetch, std::make_shared<HttplibTransport>());
}

std::set<parser::SectionId> parse_sections(const std::vector<std::string>& names) {
    std::set<parser::SectionId> out;
    for (const auto& n : names) {
        auto id = parser::parse_section(n);
        if (!id) throw Error(ErrorCode::Validation, "unknown section '" + n + "'");
        out.insert(*id);
    }
    return out;
}

std::optional<std::pair<int, int>> year_range(std::optional<int> from, std::optional<int> to) {
    if (!from && !to) return std::nullopt;
    return std::pair{from.value_or(1993), to.value_or(9999)};
}

void emit(const Globals& g, const json& j, const std::string& plain) {
    if (g.json_output) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << plain;
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) spdlog::warn("{}", w);
}

json grades_json(const std::vector<grader::GradeResult>& grades) {
    json arr = json::array();
    for (const auto& g : grades) {
        arr.push_back({{"company", g.company},
                       {"year", g.fiscal_year},
                       {"dimension", grader::to_string(g.dimension)},
                       {"mode", grader::to_string(g.mode)},
                       {"score", g.score}});
    }
    return arr;
}

// One row per (year, dimension): normal, strict, average.
std::string grades_table(const std::vector<grader::GradeResult>& grades) {
    std::map<std::tuple<int, grader::Dimension, grader::GraderMode>, double> raw;
    for (const auto& g : grades) raw[{g.fiscal_year, g.dimension, g.mode}] = g.score;
    auto cell = [&](int year, grader::Dimension d, grader::GraderMode m) {
        auto it = raw.find({year, d, m});
        return it == raw.end() ? std::string("-") : analytics::format_number(it->second);
    };
    std::string out = "year  dimension    normal  strict  average\n";
    for (const auto& a : analytics::average_all(grades)) {
        char line[128];
        std::snprintf(line, sizeof line, "%-5d %-12s %-7s %-7s %s\n", a.fiscal_year,
                      std::string(grader::to_string(a.dimension)).c_str(),
                      cell(a.fiscal_year, a.dimension, grader::GraderMode::Normal).c_str(),
                      cell(a.fiscal_year, a.dimension, grader::GraderMode::Strict).c_str(),
                      analytics::format_number(a.score).c_str());
        out += line;
    }
    return out;
}

json comparisons_json(const std::vector<comparator::ComparisonResult>& results) {
    json arr = json::array();
    for (const auto& c : results) {
        json rot = json::array();
        for (const auto& r : c.rotations) {
            rot.push_back({{"ordering", r.ordering},
                           {"verdict", comparator::to_string(r.verdict)},
                           {"winner", r.chosen ? json(*r.chosen) : json(nullptr)}});
        }
        arr.push_back({{"section", parser::section_info(c.section).key},
                       {"year", c.fiscal_year},
                       {"tickers", c.tickers},
                       {"rotations", rot},
                       {"winner", c.winner ? json(*c.winner) : json(nullptr)}});
    }
    return arr;
}

// --- commands -------------------------------------------------------------

int cmd_fetch(const Globals& g, const std::string& ticker, std::optional<int> year) {
    auto s = settings_from(g);
    auto client = make_client(s);
    auto cik = client->resolve_cik(edgar::Ticker::parse(ticker));
    auto refs = client->list_10k_filings(cik);
    json out = {{"ticker", ticker}, {"cik", cik.value()}, {"filings", json::array()}};
    std::string plain;
    for (const auto& ref : refs) {
        if (year && ref.fiscal_year && *ref.fiscal_year != *year) continue;
        auto doc = client->fetch_document(ref);
        auto date = edgar::format_date(ref.filing_date);
        out["filings"].push_back({{"accession", ref.accession.dashed()},
                                  {"filing_date", date},
                                  {"primary_document", ref.primary_document},
                                  {"bytes", doc.bytes.size()},
                                  {"from_cache", doc.from_cache}});
        plain += ref.accession.dashed() + "  " + date + "  " + ref.primary_document + "  " +
                 std::to_string(doc.bytes.size()) + " bytes" + (doc.from_cache ? " (cached)" : "") + "\n";
    }
    if (out["filings"].empty()) throw Error(ErrorCode::NotFound, "no matching 10-K filings for " + ticker);
    out["network_requests"] = client->network_requests();
    emit(g, out, plain);
    return 0;
}

int cmd_parse(const Globals& g, const std::string& ticker, std::optional<int> year, const std::string& csv_out,
              const std::string& isd_out, bool all_elements) {
    auto s = settings_from(g);
    auto client = make_client(s);
    auto normalised = edgar::Ticker::parse(ticker).symbol();
    std::vector<std::string> warnings;
    std::optional<std::pair<int, int>> range;
    if (year) range = std::pair{*year, *year};
    auto loaded = service::load_filings(*client, normalised, range, warnings);
    print_warnings(warnings);
    const auto& chosen = loaded.back();  // newest fiscal year
    const auto& parsed = chosen.parsed;

    if (!csv_out.empty()) {
        auto csv = parser::export_csv(parsed.filing, !all_elements);
        if (csv_out == "-") std::cout << csv;
        else fs::atomic_write(csv_out, csv, ErrorCode::InvalidArgument);
    }
    if (!isd_out.empty()) parser::write_isd(parsed.filing, isd_out);
    if (csv_out == "-") return 0;

    std::string pass_name = parsed.pass ? std::string(parser::to_string(*parsed.pass)) : "none";
    json out = {{"ticker", normalised},
                {"accession", chosen.ref.accession.dashed()},
                {"fiscal_year", parsed.filing.fiscal_year},
                {"fiscal_year_inferred", parsed.fiscal_year_inferred},
                {"locator_pass", pass_name},
                {"distinct_sections", parsed.distinct_sections},
                {"unknown_narrative_share", parsed.unknown_narrative_share},
                {"elements", parsed.filing.elements.size()},
                {"warnings", parsed.warnings}};
    std::string plain = normalised + " FY" + std::to_string(parsed.filing.fiscal_year) + " (" +
                        chosen.ref.accession.dashed() + "): " + std::to_string(parsed.filing.elements.size()) +
                        " elements, " + std::to_string(parsed.distinct_sections) + " sections via " +
                        pass_name + ", unknown narrative " +
                        analytics::format_number(parsed.unknown_narrative_share) + "\n";
    emit(g, out, plain);
    return 0;
}

struct GradeArgs {
    std::string ticker;
    std::vector<std::string> exclude;
    std::optional<int> from, to;
    bool force = false;
    std::string transcript, report_dir;
};

int cmd_grade(const Globals& g, const GradeArgs& a) {
    service::AnalysisRequest req;
    req.ticker = a.ticker;
    req.excluded_sections = parse_sections(a.exclude);
    req.year_range = year_range(a.from, a.to);
    req.force = a.force;
    req.validate();

    auto s = settings_from(g);
    auto client = make_client(s);
    auto provider = service::make_provider(provider_from(g));
    analytics::DataStore store(s.data_dir);
    service::PipelineOptions opts;
    if (!a.transcript.empty()) opts.grade_transcript = a.transcript;
    if (!a.report_dir.empty()) opts.report_dir = a.report_dir;
    opts.job_id = "cli";
    auto result = service::run_pipeline(req, {*client, *provider, store}, opts,
                                        [](service::Stage st, double f, const std::string& d) {
                                            spdlog::debug("{} {:.0f}% {}", service::to_string(st), f * 100, d);
                                        });
    print_warnings(result.warnings);
    json out = {{"ticker", result.ticker},
                {"years", result.years},
                {"grades", grades_json(result.grades)},
                {"provider_grades", result.provider_grades},
                {"reused_grades", result.reused_grades},
                {"warnings", result.warnings}};
    std::string plain = grades_table(result.grades) + std::to_string(result.provider_grades) + " graded, " +
                        std::to_string(result.reused_grades) + " reused\n";
    emit(g, out, plain);
    return 0;
}

struct CompareArgs {
    std::vector<std::string> tickers;
    std::vector<std::string> sections;
    std::optional<int> year;
    int rotations = 3;
    bool force = false;
    std::string transcript;
};

int cmd_compare(const Globals& g, const CompareArgs& a) {
    if (a.tickers.size() != 3) throw Error(ErrorCode::Validation, "compare needs exactly three tickers");
    std::array<std::string, 3> tickers;
    for (std::size_t i = 0; i < 3; ++i) tickers[i] = edgar::Ticker::parse(a.tickers[i]).symbol();
    if (tickers[0] == tickers[1] || tickers[0] == tickers[2] || tickers[1] == tickers[2]) {
        throw Error(ErrorCode::Validation, "compare tickers must be distinct");
    }
    if (a.rotations < 1 || a.rotations > 3) throw Error(ErrorCode::Validation, "--rotations must be 1..3");

    auto s = settings_from(g);
    auto client = make_client(s);
    auto provider = service::make_provider(provider_from(g));
    analytics::DataStore store(s.data_dir);

    std::optional<std::pair<int, int>> range;
    if (a.year) range = std::pair{*a.year, *a.year};
    std::vector<std::string> warnings;
    std::vector<service::LoadedFiling> filings;
    for (const auto& t : tickers) {
        for (auto& l : service::load_filings(*client, t, range, warnings)) filings.push_back(std::move(l));
    }
    service::CompareSettings cs;
    if (!a.sections.empty()) {
        auto set = parse_sections(a.sections);
        cs.sections.assign(set.begin(), set.end());
    }
    cs.rotations = a.rotations;
    cs.force = a.force;
    if (!a.transcript.empty()) cs.transcript = a.transcript;
    auto run = service::compare_companies(tickers, filings, {*client, *provider, store}, cs, warnings);
    print_warnings(warnings);

    std::string plain;
    for (const auto& c : run.results) {
        plain += std::to_string(c.fiscal_year) + "  " + std::string(parser::section_info(c.section).key) + "  " +
                 (c.winner ? *c.winner : std::string("(no majority)")) + "\n";
    }
    for (const auto& sk : run.skipped) {
        plain += std::to_string(sk.fiscal_year) + "  " + std::string(parser::section_info(sk.section).key) +
                 "  skipped: no text for " + text::join(sk.missing, ",") + "\n";
    }
    json skipped = json::array();
    for (const auto& sk : run.skipped) {
        skipped.push_back(
            {{"section", parser::section_info(sk.section).key}, {"year", sk.fiscal_year}, {"missing", sk.missing}});
    }
    json out = {{"tickers", tickers},
                {"comparisons", comparisons_json(run.results)},
                {"skipped", skipped},
                {"reused", run.reused},
                {"warnings", warnings}};
    emit(g, out, plain);
    return 0;
}

int cmd_report(const Globals& g, const std::string& raw_ticker, const std::string& format, const std::string& out_dir) {
    auto s = settings_from(g);
    auto ticker = edgar::Ticker::parse(raw_ticker).symbol();
    analytics::DataStore store(s.data_dir);
    if (format == "json") {
        json out = {{"ratings", service::ratings_payload(store, ticker)},
                    {"proportions", service::proportions_payload(store, ticker)},
                    {"correlations", service::correlations_payload(store, ticker, "company")}};
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    auto ds = store.load(ticker);
    if (ds.grades.empty()) throw Error(ErrorCode::NotFound, "no stored grades for " + ticker);
    std::vector<comparator::ComparisonResult> comps;
    for (const auto& c : ds.comparisons) comps.push_back(c.result);
    auto dir = out_dir.empty() ? s.data_dir / ticker / "report" : std::filesystem::path(out_dir);
    auto files = analytics::write_report(dir, service::latest_grades(ds), comps);
    json out = {{"ratings", files.ratings.string()},
                {"proportions", files.proportions.string()},
                {"correlations", files.correlations.string()},
                {"wins", files.wins.string()}};
    emit(g, out,
         files.ratings.string() + "\n" + files.proportions.string() + "\n" + files.correlations.string() + "\n" +
             files.wins.string() + "\n");
    return 0;
}

struct ServeArgs {
    std::optional<int> port;
    std::string host, static_dir;
    std::size_t workers = 0;
};

int cmd_serve(const Globals& g, const ServeArgs& a) {
    auto s = settings_from(g);
    if (a.port) s.port = *a.port;
    if (!a.host.empty()) s.host = a.host;
    if (!a.static_dir.empty()) s.static_dir = a.static_dir;
    if (a.workers) s.workers = a.workers;

    // Block termination signals for every thread; one watcher thread waits
    // on them and stops the server.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto client = make_client(s);
    auto provider = service::make_provider(provider_from(g));
    analytics::DataStore store(s.data_dir);
    service::JobManager jobs(
        [&](const service::AnalysisRequest& req, const std::string& id, const service::ProgressFn& progress) {
            service::PipelineOptions opts;
            opts.job_id = id;
            return service::run_pipeline(req, {*client, *provider, store}, opts, progress);
        },
        s.workers);
    service::ApiServer server({s, *client, *provider, store, jobs});
    int port = server.bind(s.host, s.port);
    std::cout << "listening on http://" << s.host << ":" << port << std::endl;

    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {}; shutting down", sig);
        server.stop();
    });
    server.run();
    // run() can also return on its own; wake the watcher so it can be joined.
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fetch, parse and grade 10-K filings"};
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json_output, "Machine-readable output");
    app.add_flag("--verbose,-v", g.verbose, "Debug logging to stderr");
    app.add_option("--cache-dir", g.cache_dir, "EDGAR cache directory (EDGAR_CACHE_DIR)");
    app.add_option("--data-dir", g.data_dir, "Result store directory (DATA_DIR)");
    app.add_option("--user-agent", g.user_agent, "EDGAR User-Agent with contact (EDGAR_USER_AGENT)");
    app.add_flag("--offline", g.offline, "Serve everything from the cache");
    app.add_option("--provider", g.provider.kind, "Completion provider: stub, replay or http")
        ->check(CLI::IsMember({"stub", "replay", "http"}));
    app.add_option("--stub-answer", g.provider.stub_answer, "Constant completion for the stub provider");
    app.add_option("--stub-script", g.stub_script, "JSON rule script for the stub provider");
    app.add_option("--replay-dir", g.replay_dir, "Directory of recorded *.ndjson completions");
    app.add_option("--record", g.record_file, "Append every provider exchange to this NDJSON file");
    app.fallthrough();

    std::string ticker;
    std::optional<int> year;

    auto* fetch = app.add_subcommand("fetch", "Download (or read cached) 10-K documents");
    fetch->add_option("ticker", ticker)->required();
    fetch->add_option("--year", year, "Only the filing for this fiscal year");

    std::string csv_out, isd_out;
    bool all_elements = false;
    auto* parse = app.add_subcommand("parse", "Partition a filing into sectioned elements");
    parse->add_option("ticker", ticker)->required();
    parse->add_option("--year", year, "Fiscal year (default: newest)");
    parse->add_option("--csv", csv_out, "Write the element CSV here ('-' for stdout)");
    parse->add_option("--isd", isd_out, "Write the intermediate sectioned document here");
    parse->add_flag("--all-elements", all_elements, "Include headings, tables and page breaks in the CSV");

    GradeArgs ga;
    auto* grade = app.add_subcommand("grade", "Absolute grading of every fiscal year");
    grade->add_option("ticker", ga.ticker)->required();
    grade->add_option("--exclude", ga.exclude, "Sections to leave out, e.g. ITEM_1A_RISK_FACTORS or 1A");
    grade->add_option("--from", ga.from, "First fiscal year");
    grade->add_option("--to", ga.to, "Last fiscal year");
    grade->add_flag("--force", ga.force, "Regrade even when stored grades match");
    grade->add_option("--transcript", ga.transcript, "Append prompt/completion records here");
    grade->add_option("--report-dir", ga.report_dir, "Write CSV reports here");

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "Three-way relative comparison");
    compare->add_option("tickers", ca.tickers)->required()->expected(3);
    compare->add_option("--sections", ca.sections, "Sections to compare (default 1, 1A, 7, 7A)");
    compare->add_option("--year", ca.year, "Only this fiscal year");
    compare->add_option("--rotations", ca.rotations, "Orderings per comparison (1-3)");
    compare->add_flag("--force", ca.force, "Rerun even when stored results match");
    compare->add_option("--transcript", ca.transcript, "Append per-rotation records here");

    std::string format = "csv", out_dir;
    auto* report = app.add_subcommand("report", "Export stored results");
    report->add_option("ticker", ticker)->required();
    report->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    report->add_option("--out", out_dir, "Output directory for CSVs");

    ServeArgs sa;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--port", sa.port, "Port (0 picks a free one; PORT)");
    serve->add_option("--host", sa.host, "Bind address");
    serve->add_option("--static-dir", sa.static_dir, "UI assets served under / (TENK_STATIC_DIR)");
    serve->add_option("--workers", sa.workers, "Concurrent analysis jobs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    auto logger = spdlog::stderr_color_mt("tenk");
    spdlog::set_default_logger(logger);
    spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::warn);

    try {
        if (*fetch) return cmd_fetch(g, ticker, year);
        if (*parse) return cmd_parse(g, ticker, year, csv_out, isd_out, all_elements);
        if (*grade) return cmd_grade(g, ga);
        if (*compare) return cmd_compare(g, ca);
        if (*report) return cmd_report(g, ticker, format, out_dir);
        if (*serve) return cmd_serve(g, sa);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return is_validation_error(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 1;
}
