#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tenk/parser/sections.hpp"

namespace tenk::parser {

enum class ElementType { NarrativeText, Title, ListItem, Table, PageBreak, Uncategorized };

std::string_view to_string(ElementType type) noexcept;
std::optional<ElementType> element_type_from_string(std::string_view name) noexcept;

struct FilingElement {
    std::size_t ordinal = 0;
    ElementType element_type = ElementType::Uncategorized;
    std::string text;
    SectionId section = SectionId::Unknown;

    bool operator==(const FilingElement&) const = default;
};

/// The ordered, section-tagged document for one company and fiscal year.
struct SectionedFiling {
    std::string company;
    int fiscal_year = 0;
    std::vector<FilingElement> elements;

    bool operator==(const SectionedFiling&) const = default;
};

}  // namespace tenk::parser
