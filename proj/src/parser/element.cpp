#include "tenk/parser/element.hpp"

#include <array>

namespace tenk::parser {

namespace {
constexpr std::array<std::pair<ElementType, std::string_view>, 6> kNames{{
    {ElementType::NarrativeText, "NarrativeText"},
    {ElementType::Title, "Title"},
    {ElementType::ListItem, "ListItem"},
    {ElementType::Table, "Table"},
    {ElementType::PageBreak, "PageBreak"},
    {ElementType::Uncategorized, "UncategorizedText"},
}};
}  // namespace

std::string_view to_string(ElementType type) noexcept {
    for (const auto& [t, name] : kNames) {
        if (t == type) return name;
    }
    return "UncategorizedText";
}

std::optional<ElementType> element_type_from_string(std::string_view name) noexcept {
    for (const auto& [t, n] : kNames) {
        if (n == name) return t;
    }
    if (name == "Uncategorized") return ElementType::Uncategorized;
    return std::nullopt;
}

}  // namespace tenk::parser
