#include "tenk/analytics/store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include "tenk/error.hpp"
#include "tenk/fs.hpp"
#include "tenk/hash.hpp"

namespace tenk::analytics {

namespace stdfs = std::filesystem;
using json = nlohmann::json;
using grader::GradeResult;

namespace {

std::string envelope(const char* kind, const json& data) {
    auto body = data.dump();
    json line = {{"schema_version", kSchemaVersion}, {"kind", kind}, {"data", data}, {"checksum", sha256_hex(body)}};
    return line.dump();
}

template <class Decode>
void read_records(const stdfs::path& file, const char* kind, Decode decode) {
    std::error_code ec;
    if (!stdfs::exists(file, ec)) return;
    std::size_t lineno = 0;
    for (const auto& line : fs::read_lines(file)) {
        ++lineno;
        if (line.empty()) continue;
        auto where = file.string() + ":" + std::to_string(lineno);
        auto rec = json::parse(line, nullptr, false);
        if (!rec.is_object() || !rec.contains("data") || !rec.contains("checksum") || !rec.contains("schema_version")) {
            throw Error(ErrorCode::StorageCorrupt, where + ": malformed record");
        }
        if (!rec["schema_version"].is_number_integer() || rec["schema_version"].get<int>() != kSchemaVersion) {
            throw Error(ErrorCode::StorageCorrupt, where + ": unsupported schema_version " + rec["schema_version"].dump());
        }
        if (rec.value("kind", "") != kind) throw Error(ErrorCode::StorageCorrupt, where + ": unexpected record kind");
        if (!rec["checksum"].is_string() || rec["checksum"].get<std::string>() != sha256_hex(rec["data"].dump())) {
            throw Error(ErrorCode::StorageCorrupt, where + ": checksum mismatch");
        }
        try {
            decode(rec["data"]);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::StorageCorrupt, where + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::StorageCorrupt, where + ": " + e.what());
        }
    }
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> string_or_null(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::string>();
}

parser::SectionId section_from_key(const std::string& key) {
    auto s = parser::parse_section(key);
    if (!s) throw Error(ErrorCode::StorageCorrupt, "unknown section " + key);
    return *s;
}

}  // namespace

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json to_json(const GradeResult& g) {
    return {
        {"company", g.company},
        {"fiscal_year", g.fiscal_year},
        {"dimension", grader::to_string(g.dimension)},
        {"mode", grader::to_string(g.mode)},
        {"score", g.score},
        {"chunk_scores", g.chunk_scores},
        {"prompt_hash", g.prompt_hash},
        {"raw_completion", g.raw_completion},
        {"failed_chunks", g.failed_chunks},
    };
}

GradeResult grade_from_json(const json& j) {
    GradeResult g;
    g.company = j.at("company").get<std::string>();
    g.fiscal_year = j.at("fiscal_year").get<int>();
    auto d = grader::parse_dimension(j.at("dimension").get<std::string>());
    auto m = grader::parse_mode(j.at("mode").get<std::string>());
    if (!d || !m) throw Error(ErrorCode::StorageCorrupt, "bad dimension or mode");
    g.dimension = *d;
    g.mode = *m;
    g.score = j.at("score").get<double>();
    g.chunk_scores = j.at("chunk_scores").get<std::vector<double>>();
    g.prompt_hash = j.at("prompt_hash").get<std::string>();
    g.raw_completion = j.at("raw_completion").get<std::string>();
    g.failed_chunks = j.at("failed_chunks").get<std::vector<std::size_t>>();
    return g;
}

json to_json(const comparator::ComparisonResult& c) {
    json rotations = json::array();
    for (const auto& r : c.rotations) {
        rotations.push_back({
            {"ordering", r.ordering},
            {"verdict", comparator::to_string(r.verdict)},
            {"chosen", optional_string(r.chosen)},
            {"prompt_hash", r.prompt_hash},
            {"raw_completion", r.raw_completion},
            {"error", r.error},
        });
    }
    return {
        {"section", parser::section_info(c.section).key},
        {"fiscal_year", c.fiscal_year},
        {"tickers", c.tickers},
        {"rotations", rotations},
        {"winner", optional_string(c.winner)},
    };
}

comparator::ComparisonResult comparison_from_json(const json& j) {
    comparator::ComparisonResult c;
    c.section = section_from_key(j.at("section").get<std::string>());
    c.fiscal_year = j.at("fiscal_year").get<int>();
    c.tickers = j.at("tickers").get<std::array<std::string, 3>>();
    for (const auto& r : j.at("rotations")) {
        comparator::RotationOutcome o;
        o.ordering = r.at("ordering").get<std::array<std::string, 3>>();
        auto v = comparator::verdict_from_string(r.at("verdict").get<std::string>());
        if (!v) throw Error(ErrorCode::StorageCorrupt, "bad verdict");
        o.verdict = *v;
        o.chosen = string_or_null(r.at("chosen"));
        o.prompt_hash = r.at("prompt_hash").get<std::string>();
        o.raw_completion = r.at("raw_completion").get<std::string>();
        o.error = r.at("error").get<std::string>();
        c.rotations.push_back(std::move(o));
    }
    c.winner = string_or_null(j.at("winner"));
    return c;
}

json to_json(const AnalysisRecord& a) {
    return {
        {"job_id", a.job_id},
        {"fingerprint", a.fingerprint},
        {"ticker", a.ticker},
        {"excluded_sections", a.excluded_sections},
        {"year_from", a.year_from ? json(*a.year_from) : json(nullptr)},
        {"year_to", a.year_to ? json(*a.year_to) : json(nullptr)},
        {"peers", a.peers},
        {"provider_id", a.provider_id},
        {"generated_at", a.generated_at},
        {"years", a.years},
        {"warnings", a.warnings},
    };
}

AnalysisRecord analysis_from_json(const json& j) {
    AnalysisRecord a;
    a.job_id = j.at("job_id").get<std::string>();
    a.fingerprint = j.at("fingerprint").get<std::string>();
    a.ticker = j.at("ticker").get<std::string>();
    a.excluded_sections = j.at("excluded_sections").get<std::vector<std::string>>();
    if (!j.at("year_from").is_null()) a.year_from = j["year_from"].get<int>();
    if (!j.at("year_to").is_null()) a.year_to = j["year_to"].get<int>();
    a.peers = j.at("peers").get<std::vector<std::string>>();
    a.provider_id = j.at("provider_id").get<std::string>();
    a.generated_at = j.at("generated_at").get<std::string>();
    a.years = j.at("years").get<std::vector<int>>();
    a.warnings = j.at("warnings").get<std::vector<std::string>>();
    return a;
}

DataStore::DataStore(stdfs::path root) : root_(std::move(root)) {}

stdfs::path DataStore::dir(const std::string& ticker) const {
    if (ticker.empty() || ticker.find('/') != std::string::npos || ticker.find("..") != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "bad ticker for storage: " + ticker);
    }
    return root_ / ticker;
}

void DataStore::append_grades(const std::string& ticker, const std::vector<StoredGrade>& grades) {
    std::lock_guard lock(mutex_);
    auto file = dir(ticker) / "grades.ndjson";
    for (const auto& g : grades) {
        auto data = to_json(g.result);
        data["fingerprint"] = g.fingerprint;
        data["provider_id"] = g.provider_id;
        fs::append_line(file, envelope("grade", data));
    }
}

void DataStore::append_comparisons(const std::vector<StoredComparison>& comparisons) {
    std::lock_guard lock(mutex_);
    for (const auto& c : comparisons) {
        auto data = to_json(c.result);
        data["fingerprint"] = c.fingerprint;
        data["provider_id"] = c.provider_id;
        auto line = envelope("comparison", data);
        std::set<std::string> owners(c.result.tickers.begin(), c.result.tickers.end());
        for (const auto& t : owners) fs::append_line(dir(t) / "comparisons.ndjson", line);
    }
}

void DataStore::append_analysis(const AnalysisRecord& record) {
    std::lock_guard lock(mutex_);
    fs::append_line(dir(record.ticker) / "analyses.ndjson", envelope("analysis", to_json(record)));
}

void DataStore::write_meta(const std::string& ticker, const Meta& meta) {
    std::lock_guard lock(mutex_);
    json j = {{"schema_version", meta.schema_version},
              {"generated_at", meta.generated_at},
              {"provider_id", meta.provider_id}};
    fs::atomic_write(dir(ticker) / "meta.json", j.dump(2), ErrorCode::CacheWriteError);
}

Dataset DataStore::load(const std::string& ticker) const {
    std::lock_guard lock(mutex_);
    Dataset ds;
    auto d = dir(ticker);
    read_records(d / "grades.ndjson", "grade", [&](const json& data) {
        ds.grades.push_back({grade_from_json(data), data.at("fingerprint").get<std::string>(),
                             data.at("provider_id").get<std::string>()});
    });
    read_records(d / "comparisons.ndjson", "comparison", [&](const json& data) {
        ds.comparisons.push_back({comparison_from_json(data), data.at("fingerprint").get<std::string>(),
                                  data.at("provider_id").get<std::string>()});
    });
    read_records(d / "analyses.ndjson", "analysis",
                 [&](const json& data) { ds.analyses.push_back(analysis_from_json(data)); });
    if (auto bytes = fs::read_file(d / "meta.json")) {
        auto j = json::parse(*bytes, nullptr, false);
        if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
            throw Error(ErrorCode::StorageCorrupt, (d / "meta.json").string() + ": malformed");
        }
        if (j["schema_version"].get<int>() != kSchemaVersion) {
            throw Error(ErrorCode::StorageCorrupt, (d / "meta.json").string() + ": unsupported schema_version");
        }
        ds.meta = Meta{j["schema_version"].get<int>(), j.value("generated_at", ""), j.value("provider_id", "")};
    }
    return ds;
}

std::vector<std::string> DataStore::tickers() const {
    std::vector<std::string> out;
    std::error_code ec;
    if (!stdfs::is_directory(root_, ec)) return out;
    for (const auto& entry : stdfs::directory_iterator(root_)) {
        if (entry.is_directory()) out.push_back(entry.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tenk::analytics
