#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tenk/edgar/types.hpp"
#include "tenk/parser/classifier.hpp"
#include "tenk/parser/element.hpp"
#include "tenk/parser/section_locator.hpp"

namespace tenk::parser {

struct ParseOptions {
    ClassifierConfig classifier;
    /// Enables the filing-date fallback when no period statement is found.
    std::optional<edgar::Date> filing_date;
};

struct ParsedFiling {
    SectionedFiling filing;
    /// Year came from the filing date, not from the document.
    bool fiscal_year_inferred = false;
    /// False when fewer than two items were located; the filing is then
    /// usable for grading (all UNKNOWN) but not for relative analysis.
    bool sections_found = false;
    std::optional<LocatorPass> pass;
    std::size_t distinct_sections = 0;
    double unknown_narrative_share = 0.0;
    std::vector<std::string> warnings;
};

/// partition -> fiscal year -> locate sections -> assign sections.
ParsedFiling parse_filing(std::string_view raw, std::string company, const ParseOptions& options = {});

/// Narrative characters tagged UNKNOWN over all narrative characters
/// (0 when the filing has no narrative text).
double unknown_narrative_share(const SectionedFiling& filing);

std::string_view to_string(LocatorPass pass) noexcept;

}  // namespace tenk::parser
