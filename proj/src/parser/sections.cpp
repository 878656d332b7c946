#include "tenk/parser/sections.hpp"

#include <array>
#include <regex>
#include <string>

#include "tenk/text.hpp"

namespace tenk::parser {
namespace {

constexpr std::array<SectionInfo, 24> kSections{{
    {SectionId::Item1, "ITEM_1_BUSINESS", "1", "BUSINESS"},
    {SectionId::Item1A, "ITEM_1A_RISK_FACTORS", "1A", "RISK FACTORS"},
    {SectionId::Item1B, "ITEM_1B_UNRESOLVED_STAFF_COMMENTS", "1B", "UNRESOLVED STAFF COMMENTS"},
    {SectionId::Item1C, "ITEM_1C_CYBERSECURITY", "1C", "CYBERSECURITY"},
    {SectionId::Item2, "ITEM_2_PROPERTIES", "2", "PROPERTIES"},
    {SectionId::Item3, "ITEM_3_LEGAL_PROCEEDINGS", "3", "LEGAL PROCEEDINGS"},
    {SectionId::Item4, "ITEM_4_MINE_SAFETY_DISCLOSURES", "4", "MINE SAFETY DISCLOSURES"},
    {SectionId::Item5, "ITEM_5_MARKET_FOR_COMMON_EQUITY", "5",
     "MARKET FOR REGISTRANT'S COMMON EQUITY, RELATED STOCKHOLDER MATTERS AND ISSUER PURCHASES OF EQUITY SECURITIES"},
    {SectionId::Item6, "ITEM_6_RESERVED", "6", "RESERVED"},
    {SectionId::Item7, "ITEM_7_MDA", "7",
     "MANAGEMENT'S DISCUSSION AND ANALYSIS OF FINANCIAL CONDITION AND RESULTS OF OPERATIONS"},
    {SectionId::Item7A, "ITEM_7A_MARKET_RISK", "7A", "QUANTITATIVE AND QUALITATIVE DISCLOSURES ABOUT MARKET RISK"},
    {SectionId::Item8, "ITEM_8_FINANCIAL_STATEMENTS", "8", "FINANCIAL STATEMENTS AND SUPPLEMENTARY DATA"},
    {SectionId::Item9, "ITEM_9_ACCOUNTANT_CHANGES", "9",
     "CHANGES IN AND DISAGREEMENTS WITH ACCOUNTANTS ON ACCOUNTING AND FINANCIAL DISCLOSURE"},
    {SectionId::Item9A, "ITEM_9A_CONTROLS_AND_PROCEDURES", "9A", "CONTROLS AND PROCEDURES"},
    {SectionId::Item9B, "ITEM_9B_OTHER_INFORMATION", "9B", "OTHER INFORMATION"},
    {SectionId::Item9C, "ITEM_9C_FOREIGN_JURISDICTION_INSPECTIONS", "9C",
     "DISCLOSURE REGARDING FOREIGN JURISDICTIONS THAT PREVENT INSPECTIONS"},
    {SectionId::Item10, "ITEM_10_GOVERNANCE", "10", "DIRECTORS, EXECUTIVE OFFICERS AND CORPORATE GOVERNANCE"},
    {SectionId::Item11, "ITEM_11_EXECUTIVE_COMPENSATION", "11", "EXECUTIVE COMPENSATION"},
    {SectionId::Item12, "ITEM_12_SECURITY_OWNERSHIP", "12",
     "SECURITY OWNERSHIP OF CERTAIN BENEFICIAL OWNERS AND MANAGEMENT AND RELATED STOCKHOLDER MATTERS"},
    {SectionId::Item13, "ITEM_13_RELATIONSHIPS_AND_INDEPENDENCE", "13",
     "CERTAIN RELATIONSHIPS AND RELATED TRANSACTIONS, AND DIRECTOR INDEPENDENCE"},
    {SectionId::Item14, "ITEM_14_ACCOUNTANT_FEES", "14", "PRINCIPAL ACCOUNTANT FEES AND SERVICES"},
    {SectionId::Item15, "ITEM_15_EXHIBITS", "15", "EXHIBITS AND FINANCIAL STATEMENT SCHEDULES"},
    {SectionId::Item16, "ITEM_16_FORM_10K_SUMMARY", "16", "FORM 10-K SUMMARY"},
    {SectionId::Unknown, "UNKNOWN", "", "UNKNOWN"},
}};

}  // namespace

std::span<const SectionInfo> all_sections() noexcept { return kSections; }

const SectionInfo& section_info(SectionId id) noexcept { return kSections[static_cast<std::size_t>(id)]; }

std::optional<SectionId> section_from_item(int number, char letter) noexcept {
    std::string item = std::to_string(number);
    if (letter != '\0') item.push_back(static_cast<char>(letter >= 'a' && letter <= 'z' ? letter - 'a' + 'A' : letter));
    for (const auto& info : kSections) {
        if (info.item == item && info.id != SectionId::Unknown) return info.id;
    }
    return std::nullopt;
}

std::optional<SectionId> parse_section(std::string_view name) {
    auto upper = text::to_upper_ascii(text::normalize_whitespace(name));
    for (const auto& info : kSections) {
        if (upper == info.key || upper == info.display) return info.id;
    }
    static const std::regex item_form(R"(^(?:ITEM[ _]?)?(\d{1,2})([A-C])?$)");
    std::smatch m;
    if (std::regex_match(upper, m, item_form)) {
        return section_from_item(std::stoi(m[1].str()), m[2].matched ? m[2].str()[0] : '\0');
    }
    return std::nullopt;
}

}  // namespace tenk::parser
