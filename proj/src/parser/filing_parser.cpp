#include "tenk/parser/filing_parser.hpp"

#include <set>

#include "tenk/error.hpp"
#include "tenk/parser/fiscal_year.hpp"
#include "tenk/parser/html_partitioner.hpp"

namespace tenk::parser {

std::string_view to_string(LocatorPass pass) noexcept {
    switch (pass) {
        case LocatorPass::TocAnchors: return "toc_anchors";
        case LocatorPass::TocText: return "toc_text";
        case LocatorPass::HeadingRegex: return "heading_regex";
    }
    return "heading_regex";
}

double unknown_narrative_share(const SectionedFiling& filing) {
    std::size_t total = 0;
    std::size_t unknown = 0;
    for (const auto& e : filing.elements) {
        if (e.element_type != ElementType::NarrativeText) continue;
        total += e.text.size();
        if (e.section == SectionId::Unknown) unknown += e.text.size();
    }
    return total == 0 ? 0.0 : static_cast<double>(unknown) / static_cast<double>(total);
}

ParsedFiling parse_filing(std::string_view raw, std::string company, const ParseOptions& options) {
    auto document = partition_document(raw, options.classifier);

    ParsedFiling parsed;
    parsed.filing.company = std::move(company);
    try {
        parsed.filing.fiscal_year = extract_fiscal_year(document.elements);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::YearNotFound || !options.filing_date) throw;
        parsed.filing.fiscal_year = fiscal_year_from_filing_date(*options.filing_date);
        parsed.fiscal_year_inferred = true;
        parsed.warnings.push_back("fiscal year inferred from filing date");
    }

    std::vector<SectionStart> starts;
    try {
        auto location = locate_sections_detailed(document.elements, &document.anchors);
        starts = std::move(location.starts);
        parsed.pass = location.pass;
        parsed.sections_found = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoSectionsFound) throw;
        parsed.warnings.push_back(e.what());
    }
    parsed.filing.elements = assign_sections(std::move(document.elements), starts);

    std::set<SectionId> distinct;
    for (const auto& s : starts) distinct.insert(s.section);
    parsed.distinct_sections = distinct.size();
    parsed.unknown_narrative_share = unknown_narrative_share(parsed.filing);
    return parsed;
}

}  // namespace tenk::parser
