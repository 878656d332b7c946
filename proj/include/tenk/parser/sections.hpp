#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace tenk::parser {

/// 10-K Items in filing order. Enumerator order is the document order rank.
enum class SectionId : std::uint8_t {
    Item1,
    Item1A,
    Item1B,
    Item1C,
    Item2,
    Item3,
    Item4,
    Item5,
    Item6,
    Item7,
    Item7A,
    Item8,
    Item9,
    Item9A,
    Item9B,
    Item9C,
    Item10,
    Item11,
    Item12,
    Item13,
    Item14,
    Item15,
    Item16,
    Unknown,
};

struct SectionInfo {
    SectionId id;
    std::string_view key;      // canonical id, e.g. ITEM_1A_RISK_FACTORS
    std::string_view item;     // e.g. "1A"
    std::string_view display;  // SEC item title, e.g. RISK FACTORS
};

/// All labels, Items 1-16 in order followed by UNKNOWN.
std::span<const SectionInfo> all_sections() noexcept;
const SectionInfo& section_info(SectionId id) noexcept;

std::optional<SectionId> section_from_item(int number, char letter) noexcept;

/// Accepts the canonical key, the display name, "1A", "ITEM_1A" or
/// "Item 1A" (case-insensitive).
std::optional<SectionId> parse_section(std::string_view name);

}  // namespace tenk::parser
