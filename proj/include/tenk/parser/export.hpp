#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tenk/parser/element.hpp"

namespace tenk::parser {

/// `Section,Element Type,Text` with one CRLF-terminated row per element.
/// The Text column is always quoted; other columns only when needed.
std::string export_csv(const SectionedFiling& filing, bool narrative_only);

struct CsvRow {
    SectionId section;
    ElementType element_type;
    std::string text;

    bool operator==(const CsvRow&) const = default;
};

/// Inverse of export_csv. Throws InvalidArgument on a bad header or label.
std::vector<CsvRow> read_csv(std::string_view data);

/// Line-delimited ISD: a header record then one record per element, each
/// carrying ordinal, element_type, section and text.
std::string serialize_isd(const SectionedFiling& filing);
SectionedFiling deserialize_isd(std::string_view data);

void write_isd(const SectionedFiling& filing, const std::filesystem::path& path);
SectionedFiling read_isd(const std::filesystem::path& path);

}  // namespace tenk::parser
