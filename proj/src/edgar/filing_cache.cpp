#include "tenk/edgar/filing_cache.hpp"

#include <json.hpp>

#include "tenk/fs.hpp"
#include "tenk/hash.hpp"
#include "tenk/text.hpp"

namespace tenk::edgar {

namespace stdfs = std::filesystem;
using json = nlohmann::json;

FilingCache::FilingCache(stdfs::path root) : root_(std::move(root)) {}

stdfs::path FilingCache::document_path(const FilingRef& ref) const {
    return root_ / ref.cik.value() / ref.accession.dashless() / ref.primary_document;
}

stdfs::path FilingCache::sidecar_path(const FilingRef& ref) const {
    return root_ / ref.cik.value() / ref.accession.dashless() / "_filing.json";
}

stdfs::path FilingCache::tickers_path() const { return root_ / "company_tickers.json"; }

stdfs::path FilingCache::submissions_path(const Cik& cik, const std::string& page) const {
    return root_ / cik.value() / "submissions" / page;
}

std::optional<CachedDocument> FilingCache::load_document(const FilingRef& ref) const {
    auto bytes = fs::read_file(document_path(ref));
    if (!bytes) return std::nullopt;
    CachedDocument doc{std::move(*bytes), guess_media_type(ref.primary_document)};
    if (auto sidecar = fs::read_file(sidecar_path(ref))) {
        auto meta = json::parse(*sidecar, nullptr, false);
        if (meta.is_object() && meta.contains("media_type") && meta["media_type"].is_string()) {
            doc.media_type = meta["media_type"].get<std::string>();
        }
    }
    return doc;
}

void FilingCache::store_document(const FilingRef& ref, const CachedDocument& doc) const {
    fs::atomic_write(document_path(ref), doc.bytes);
    json meta = {
        {"cik", ref.cik.value()},
        {"accession", ref.accession.dashed()},
        {"form_type", ref.form_type},
        {"filing_date", format_date(ref.filing_date)},
        {"primary_document", ref.primary_document},
        {"media_type", doc.media_type},
        {"size", doc.bytes.size()},
        {"sha256", sha256_hex(doc.bytes)},
    };
    fs::atomic_write(sidecar_path(ref), meta.dump(2));
}

std::optional<FilingCache::Blob> FilingCache::load_blob(const stdfs::path& path) const {
    std::error_code ec;
    auto modified = stdfs::last_write_time(path, ec);
    if (ec) return std::nullopt;
    auto bytes = fs::read_file(path);
    if (!bytes) return std::nullopt;
    auto age = std::chrono::duration_cast<std::chrono::seconds>(stdfs::file_time_type::clock::now() - modified);
    return Blob{std::move(*bytes), age};
}

void FilingCache::store_blob(const stdfs::path& path, const std::string& bytes) const {
    fs::atomic_write(path, bytes);
}

std::string guess_media_type(const std::string& document_name) {
    auto ext = text::to_lower_ascii(stdfs::path(document_name).extension().string());
    if (ext == ".htm" || ext == ".html") return "text/html";
    if (ext == ".txt") return "text/plain";
    if (ext == ".xml") return "application/xml";
    if (ext == ".json") return "application/json";
    if (ext == ".pdf") return "application/pdf";
    return "application/octet-stream";
}

}  // namespace tenk::edgar
