#include "tenk/service/pipeline.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <spdlog/spdlog.h>

#include "tenk/grader/prompt.hpp"
#include "tenk/fs.hpp"
#include "tenk/hash.hpp"
#include "tenk/parser/fiscal_year.hpp"
#include "tenk/parser/sections.hpp"
#include "tenk/text.hpp"

namespace tenk::service {

using json = nlohmann::json;
using grader::Dimension;
using grader::GradeResult;
using grader::GraderMode;

namespace {

Error validation(const std::string& msg) { return Error(ErrorCode::Validation, msg); }

std::vector<std::string> section_keys(const std::set<SectionId>& sections) {
    std::vector<std::string> keys;
    for (auto s : sections) keys.emplace_back(parser::section_info(s).key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::string normalise_ticker(const std::string& raw) {
    try {
        return edgar::Ticker::parse(raw).symbol();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownTicker) throw;
        throw validation(e.what());
    }
}

}  // namespace

void AnalysisRequest::validate() {
    ticker = normalise_ticker(ticker);
    if (excluded_sections.size() >= parser::all_sections().size()) {
        throw validation("excluded_sections would exclude every section");
    }
    if (year_range && year_range->first > year_range->second) {
        throw validation("year_range from " + std::to_string(year_range->first) + " is after to " +
                         std::to_string(year_range->second));
    }
    if (run_relative) {
        if (peer_tickers.size() != 2) throw validation("relative analysis needs exactly 2 peer_tickers");
        for (auto& p : peer_tickers) p = normalise_ticker(p);
        if (peer_tickers[0] == peer_tickers[1] || peer_tickers[0] == ticker || peer_tickers[1] == ticker) {
            throw validation("peer_tickers must be distinct from each other and from ticker");
        }
    } else if (!peer_tickers.empty()) {
        for (auto& p : peer_tickers) p = normalise_ticker(p);
    }
}

AnalysisRequest AnalysisRequest::from_json(const json& body) {
    if (!body.is_object()) throw validation("request body must be a JSON object");
    AnalysisRequest r;
    try {
        if (!body.contains("ticker") || !body["ticker"].is_string()) throw validation("ticker is required");
        r.ticker = body["ticker"].get<std::string>();
        if (body.contains("excluded_sections")) {
            if (!body["excluded_sections"].is_array()) throw validation("excluded_sections must be an array");
            for (const auto& s : body["excluded_sections"]) {
                if (!s.is_string()) throw validation("excluded_sections entries must be strings");
                auto id = parser::parse_section(s.get<std::string>());
                if (!id) throw validation("unknown section " + s.dump());
                r.excluded_sections.insert(*id);
            }
        }
        if (body.contains("year_range") && !body["year_range"].is_null()) {
            const auto& y = body["year_range"];
            if (y.is_array() && y.size() == 2) {
                r.year_range = std::pair{y[0].get<int>(), y[1].get<int>()};
            } else if (y.is_object()) {
                r.year_range = std::pair{y.at("from").get<int>(), y.at("to").get<int>()};
            } else {
                throw validation("year_range must be [from, to] or {\"from\", \"to\"}");
            }
        }
        r.run_relative = body.value("run_relative", false);
        if (body.contains("peer_tickers") && !body["peer_tickers"].is_null()) {
            r.peer_tickers = body["peer_tickers"].get<std::vector<std::string>>();
        }
        r.force = body.value("force", false);
    } catch (const json::exception& e) {
        throw validation(std::string("malformed request: ") + e.what());
    }
    return r;
}

json AnalysisRequest::to_json() const {
    json j = {{"ticker", ticker},
              {"excluded_sections", section_keys(excluded_sections)},
              {"run_relative", run_relative},
              {"peer_tickers", peer_tickers},
              {"force", force}};
    j["year_range"] = year_range ? json{{"from", year_range->first}, {"to", year_range->second}} : json(nullptr);
    return j;
}

std::string request_fingerprint(const AnalysisRequest& r, const std::string& provider_id) {
    json j = r.to_json();
    j.erase("force");
    j["provider_id"] = provider_id;
    j["templates"] = {grader::PromptTemplate::standard().version, std::string(comparator::kComparisonTemplateVersion)};
    return sha256_hex(j.dump());
}

std::string grade_fingerprint(const std::string& ticker, int fiscal_year, const std::string& accession,
                              const std::set<SectionId>& excluded, const std::string& provider_id) {
    json j = {{"ticker", ticker},
              {"year", fiscal_year},
              {"accession", accession},
              {"excluded", section_keys(excluded)},
              {"provider", provider_id},
              {"template", grader::PromptTemplate::standard().version}};
    return sha256_hex(j.dump());
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::Queued: return "Queued";
        case Stage::Fetching: return "Fetching";
        case Stage::Parsing: return "Parsing";
        case Stage::Grading: return "Grading";
        case Stage::Comparing: return "Comparing";
        case Stage::Done: return "Done";
        case Stage::Failed: return "Failed";
    }
    return "?";
}

double overall_progress(Stage stage, double fraction) noexcept {
    fraction = std::clamp(fraction, 0.0, 1.0);
    auto band = [&](double lo, double hi) { return lo + (hi - lo) * fraction; };
    switch (stage) {
        case Stage::Queued: return 0.0;
        case Stage::Fetching: return band(0.01, 0.10);
        case Stage::Parsing: return band(0.10, 0.20);
        case Stage::Grading: return band(0.20, 0.90);
        case Stage::Comparing: return band(0.90, 0.99);
        case Stage::Done: return 1.0;
        case Stage::Failed: return 0.0;
    }
    return 0.0;
}

namespace {

// Error::what() already leads with the code name; drop it before re-wrapping.
std::string bare_message(const Error& e) {
    std::string_view msg = e.what();
    auto prefix = std::string(to_string(e.code())) + ": ";
    if (msg.substr(0, prefix.size()) == prefix) msg.remove_prefix(prefix.size());
    return std::string(msg);
}

}  // namespace

StageError::StageError(Stage stage, const Error& cause)
    : Error(cause.code(), std::string(to_string(stage)) + ": " + bare_message(cause)), stage_(stage) {}

std::vector<LoadedFiling> load_filings(edgar::EdgarClient& client, const std::string& ticker,
                                       const std::optional<std::pair<int, int>>& years,
                                       std::vector<std::string>& warnings, const ProgressFn& progress) {
    auto report = [&](Stage s, double f, const std::string& d) {
        if (progress) progress(s, f, d);
    };
    std::vector<edgar::FilingRef> refs;
    try {
        report(Stage::Fetching, 0.0, "resolving " + ticker);
        auto cik = client.resolve_cik(edgar::Ticker::parse(ticker));
        refs = client.list_10k_filings(cik);
    } catch (const Error& e) {
        throw StageError(Stage::Fetching, e);
    }
    // The fiscal year is only known after parsing; pre-filter with one year of slack.
    if (years) {
        std::erase_if(refs, [&](const edgar::FilingRef& r) {
            int approx = parser::fiscal_year_from_filing_date(r.filing_date);
            return approx + 1 < years->first || approx - 1 > years->second;
        });
    }
    if (refs.empty()) throw StageError(Stage::Fetching, Error(ErrorCode::NotFound, "no 10-K filings for " + ticker));

    std::vector<std::pair<edgar::FilingRef, edgar::FetchedDocument>> docs;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        report(Stage::Fetching, static_cast<double>(i) / refs.size(), "fetching " + refs[i].accession.dashed());
        try {
            docs.emplace_back(refs[i], client.fetch_document(refs[i]));
        } catch (const Error& e) {
            warnings.push_back("Fetching " + refs[i].accession.dashed() + ": " + e.what());
        }
    }

    std::vector<LoadedFiling> out;
    std::set<int> seen_years;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto& [ref, doc] = docs[i];
        report(Stage::Parsing, static_cast<double>(i) / docs.size(), "parsing " + ref.accession.dashed());
        try {
            parser::ParseOptions opts;
            opts.filing_date = ref.filing_date;
            auto parsed = parser::parse_filing(doc.bytes, ticker, opts);
            int year = parsed.filing.fiscal_year;
            if (years && (year < years->first || year > years->second)) continue;
            for (const auto& w : parsed.warnings) warnings.push_back(ref.accession.dashed() + ": " + w);
            // Newest filing first, so an earlier hit for the same year wins.
            if (!seen_years.insert(year).second) {
                warnings.push_back("Parsing " + ref.accession.dashed() + ": fiscal year " + std::to_string(year) +
                                   " already covered by a newer filing; skipped");
                continue;
            }
            out.push_back({ref, std::move(parsed)});
        } catch (const Error& e) {
            warnings.push_back("Parsing " + ref.accession.dashed() + ": " + e.what());
        }
    }
    if (out.empty()) {
        std::string detail = warnings.empty() ? "no filings in the requested year range" : warnings.back();
        throw StageError(docs.empty() ? Stage::Fetching : Stage::Parsing,
                         Error(ErrorCode::NotFound, "no usable 10-K for " + ticker + ": " + detail));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.parsed.filing.fiscal_year < b.parsed.filing.fiscal_year;
    });
    return out;
}

std::vector<GradeResult> latest_grades(const analytics::Dataset& ds) {
    std::map<std::tuple<int, Dimension, GraderMode>, const GradeResult*> slots;
    for (const auto& g : ds.grades) slots[{g.result.fiscal_year, g.result.dimension, g.result.mode}] = &g.result;
    std::vector<GradeResult> out;
    for (const auto& [key, g] : slots) out.push_back(*g);
    return out;
}

CompareRun compare_companies(const std::array<std::string, 3>& tickers, const std::vector<LoadedFiling>& filings,
                             PipelineDeps deps, const CompareSettings& settings, std::vector<std::string>& warnings,
                             const ProgressFn& progress) {
    const auto provider_id = deps.provider.id();
    std::vector<parser::SectionedFiling> all;
    std::map<std::pair<std::string, int>, std::string> accession;
    for (const auto& l : filings) {
        all.push_back(l.parsed.filing);
        accession[{l.parsed.filing.company, l.parsed.filing.fiscal_year}] = l.ref.accession.dashed();
    }
    CompareRun run;
    auto plan = comparator::plan_comparisons(tickers, all, settings.sections);
    run.skipped = plan.skipped;
    for (const auto& s : plan.skipped) {
        spdlog::info("comparison {} {} skipped: no narrative for {}", parser::section_info(s.section).key,
                     s.fiscal_year, text::join(s.missing, ","));
    }

    std::map<std::string, comparator::ComparisonResult> known;
    for (auto& c : deps.store.load(tickers[0]).comparisons) known[c.fingerprint] = std::move(c.result);

    comparator::CompareOptions copts;
    copts.rotations = settings.rotations;
    if (settings.transcript) {
        auto path = *settings.transcript;
        copts.transcript = [path](const comparator::ComparisonTranscriptRecord& r) {
            json slots = json::object();
            for (std::size_t i = 0; i < 3; ++i) slots[std::string(1, static_cast<char>('A' + i))] = r.ordering[i];
            json j = {{"section", parser::section_info(r.section).key},
                      {"year", r.fiscal_year},
                      {"rotation", r.rotation},
                      {"ordering", r.ordering},
                      {"slots", slots},
                      {"prompt_hash", r.prompt_hash},
                      {"raw_completion", r.raw_completion},
                      {"verdict", comparator::to_string(r.verdict)},
                      {"winner", r.chosen ? json(*r.chosen) : json(nullptr)}};
            if (!r.error.empty()) j["error"] = r.error;
            fs::append_line(path, j.dump());
        };
    }
    std::vector<analytics::StoredComparison> fresh;
    for (std::size_t t = 0; t < plan.tasks.size(); ++t) {
        const auto& task = plan.tasks[t];
        auto label = std::string(parser::section_info(task.section).key) + " " + std::to_string(task.fiscal_year);
        if (progress) progress(Stage::Comparing, static_cast<double>(t) / plan.tasks.size(), label);
        json key = {{"tickers", tickers},
                    {"section", parser::section_info(task.section).key},
                    {"year", task.fiscal_year},
                    {"rotations", settings.rotations},
                    {"provider", provider_id},
                    {"template", comparator::kComparisonTemplateVersion}};
        for (const auto& tk : tickers) key["accessions"].push_back(accession[{tk, task.fiscal_year}]);
        auto fp = sha256_hex(key.dump());
        if (auto it = known.find(fp); it != known.end() && !settings.force) {
            run.results.push_back(it->second);
            ++run.reused;
            continue;
        }
        try {
            auto c = comparator::run_comparison(task, deps.provider, copts);
            fresh.push_back({c, fp, provider_id});
            run.results.push_back(std::move(c));
        } catch (const Error& e) {
            warnings.push_back("Comparing " + label + ": " + e.what());
        }
    }
    deps.store.append_comparisons(fresh);
    return run;
}

PipelineResult run_pipeline(AnalysisRequest request, PipelineDeps deps, const PipelineOptions& options,
                            const ProgressFn& progress) {
    request.validate();
    auto report = [&](Stage s, double f, const std::string& d) {
        if (progress) progress(s, f, d);
    };
    const auto provider_id = deps.provider.id();

    PipelineResult result;
    result.ticker = request.ticker;
    auto filings = load_filings(deps.client, request.ticker, request.year_range, result.warnings, progress);

    // Grading, reusing stored grades whose fingerprint matches.
    report(Stage::Grading, 0.0, "grading");
    auto stored = deps.store.load(request.ticker);
    std::map<std::tuple<std::string, Dimension, GraderMode>, const GradeResult*> reusable;
    for (const auto& g : stored.grades) reusable[{g.fingerprint, g.result.dimension, g.result.mode}] = &g.result;

    std::optional<grader::TranscriptWriter> grade_log;
    if (options.grade_transcript) grade_log.emplace(*options.grade_transcript);

    for (std::size_t f = 0; f < filings.size(); ++f) {
        const auto& filing = filings[f].parsed.filing;
        auto fp = grade_fingerprint(request.ticker, filing.fiscal_year, filings[f].ref.accession.dashed(),
                                    request.excluded_sections, provider_id);
        std::vector<std::pair<Dimension, GraderMode>> missing;
        for (auto d : grader::kDimensions) {
            for (auto m : grader::kModes) {
                auto it = reusable.find({fp, d, m});
                if (it != reusable.end() && !request.force) {
                    result.grades.push_back(*it->second);
                    ++result.reused_grades;
                } else {
                    missing.emplace_back(d, m);
                }
            }
        }
        if (!missing.empty()) {
            grader::GradeOptions gopts;
            gopts.pairs = missing;
            gopts.parallelism = options.grade_parallelism;
            if (grade_log) gopts.transcript = grade_log->sink();
            gopts.on_progress = [&](std::size_t done, std::size_t total) {
                report(Stage::Grading, (static_cast<double>(f) + static_cast<double>(done) / total) / filings.size(),
                       "grading " + std::to_string(filing.fiscal_year));
            };
            try {
                auto graded = grader::grade_filing(filing, deps.provider, request.excluded_sections, gopts);
                std::vector<analytics::StoredGrade> rows;
                for (auto& g : graded.results) rows.push_back({g, fp, provider_id});
                deps.store.append_grades(request.ticker, rows);
                result.provider_grades += graded.results.size();
                for (auto& g : graded.results) result.grades.push_back(std::move(g));
                for (const auto& fail : graded.failures) {
                    result.warnings.push_back("Grading " + std::to_string(filing.fiscal_year) + " " +
                                              std::string(grader::to_string(fail.dimension)) + "/" +
                                              std::string(grader::to_string(fail.mode)) + ": " + fail.message);
                }
            } catch (const Error& e) {
                result.warnings.push_back("Grading " + std::to_string(filing.fiscal_year) + ": " + e.what());
            }
        }
        result.years.push_back(filing.fiscal_year);
        report(Stage::Grading, static_cast<double>(f + 1) / filings.size(), "graded " + std::to_string(filing.fiscal_year));
    }
    if (result.grades.empty()) {
        throw StageError(Stage::Grading, Error(ErrorCode::AllChunksFailed,
                                               "no grades produced for " + request.ticker + ": " +
                                                   (result.warnings.empty() ? "" : result.warnings.back())));
    }

    if (request.run_relative) {
        report(Stage::Comparing, 0.0, "loading peers");
        std::vector<LoadedFiling> all = filings;
        for (const auto& peer : request.peer_tickers) {
            try {
                for (auto& l : load_filings(deps.client, peer, request.year_range, result.warnings)) {
                    all.push_back(std::move(l));
                }
            } catch (const Error& e) {
                result.warnings.push_back("Comparing: peer " + peer + ": " + e.what());
            }
        }
        std::vector<SectionId> sections;
        for (auto s : options.comparison_sections) {
            if (!request.excluded_sections.count(s)) sections.push_back(s);
        }
        CompareSettings cs;
        cs.sections = sections;
        cs.rotations = options.rotations;
        cs.force = request.force;
        cs.transcript = options.comparison_transcript;
        auto run = compare_companies({request.ticker, request.peer_tickers[0], request.peer_tickers[1]}, all, deps, cs,
                                     result.warnings, progress);
        result.comparisons = std::move(run.results);
        result.skipped_comparisons = std::move(run.skipped);
    }

    auto& rec = result.record;
    rec.job_id = options.job_id;
    rec.fingerprint = request_fingerprint(request, provider_id);
    rec.ticker = request.ticker;
    rec.excluded_sections = section_keys(request.excluded_sections);
    if (request.year_range) {
        rec.year_from = request.year_range->first;
        rec.year_to = request.year_range->second;
    }
    rec.peers = request.peer_tickers;
    rec.provider_id = provider_id;
    rec.generated_at = analytics::utc_timestamp();
    rec.years = result.years;
    rec.warnings = result.warnings;
    deps.store.append_analysis(rec);
    deps.store.write_meta(request.ticker, {analytics::kSchemaVersion, rec.generated_at, provider_id});

    if (options.report_dir) {
        result.report = analytics::write_report(*options.report_dir, result.grades, result.comparisons);
    }
    return result;
}

}  // namespace tenk::service
