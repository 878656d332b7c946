#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "tenk/edgar/types.hpp"

namespace tenk::edgar {

struct CachedDocument {
    std::string bytes;
    std::string media_type;
};

/// On-disk layout, mirroring EDGAR archive paths:
///
///   {root}/company_tickers.json
///   {root}/{cik}/submissions/{page}.json
///   {root}/{cik}/{accession-dashless}/{primary_document}
///   {root}/{cik}/{accession-dashless}/_filing.json      (metadata sidecar)
///
/// All writes go through temp-file + rename.
class FilingCache {
public:
    explicit FilingCache(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    std::filesystem::path document_path(const FilingRef& ref) const;
    std::filesystem::path sidecar_path(const FilingRef& ref) const;
    std::filesystem::path tickers_path() const;
    std::filesystem::path submissions_path(const Cik& cik, const std::string& page) const;

    std::optional<CachedDocument> load_document(const FilingRef& ref) const;
    void store_document(const FilingRef& ref, const CachedDocument& doc) const;

    /// Raw metadata blobs (ticker map, submission pages) with their age.
    struct Blob {
        std::string bytes;
        std::chrono::seconds age;
    };
    std::optional<Blob> load_blob(const std::filesystem::path& path) const;
    void store_blob(const std::filesystem::path& path, const std::string& bytes) const;

private:
    std::filesystem::path root_;
};

/// Best-effort media type from a file extension.
std::string guess_media_type(const std::string& document_name);

}  // namespace tenk::edgar
