#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tenk/parser/element.hpp"
#include "tenk/parser/html_partitioner.hpp"

namespace tenk::parser {

struct SectionStart {
    SectionId section;
    std::size_t ordinal;

    bool operator==(const SectionStart&) const = default;
};

enum class LocatorPass { TocAnchors, TocText, HeadingRegex };

struct SectionLocation {
    std::vector<SectionStart> starts;
    LocatorPass pass = LocatorPass::HeadingRegex;
};

/// Two passes. First the table of contents: internal links resolved through
/// `anchors` when available, otherwise the TOC table's item list matched
/// against later headings. Then a regex over Title elements
/// (`^items?\s+(\d{1,2})([A-C])?\b`). From each pass's candidates the
/// longest subsequence increasing in both item order and position is kept,
/// preferring later occurrences, which drops TOC echoes. The pass covering
/// more items wins; ties favour the TOC.
///
/// Throws NoSectionsFound when fewer than two items are detected.
SectionLocation locate_sections_detailed(std::span<const FilingElement> elements,
                                         const DocumentAnchors* anchors = nullptr);

std::vector<SectionStart> locate_sections(std::span<const FilingElement> elements,
                                          const DocumentAnchors* anchors = nullptr);

/// Tags each element with the last section starting at or before its
/// ordinal; earlier elements stay UNKNOWN. Throws InvalidArgument when the
/// starts are not strictly increasing.
std::vector<FilingElement> assign_sections(std::vector<FilingElement> elements,
                                           std::span<const SectionStart> starts);

/// The item referenced at the start of a heading ("Item 7A.", "ITEMS 1 AND 2.").
std::optional<SectionId> heading_item(std::string_view text);

}  // namespace tenk::parser
