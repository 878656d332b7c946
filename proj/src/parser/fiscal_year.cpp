#include "tenk/parser/fiscal_year.hpp"

#include <algorithm>
#include <regex>
#include <string>

#include "tenk/error.hpp"

namespace tenk::parser {
namespace {

constexpr std::size_t kScanElements = 200;
constexpr std::size_t kScanChars = 2000;

bool plausible(int year) {
    int current = static_cast<int>(edgar::today().year());
    return year >= 1993 && year <= current + 1;
}

}  // namespace

int extract_fiscal_year(std::span<const FilingElement> elements) {
    static const std::regex year_ended(
        R"(for\s+the\s+(?:fiscal\s+)?year\s+ended\s*:?\s*(january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec)\.?\s+(\d{1,2})\s*,?\s*((?:19|20)\d{2}))",
        std::regex::icase);
    static const std::regex annual_report(R"(annual\s+report\b[\s\S]{0,160}?\b((?:19|20)\d{2})\b)", std::regex::icase);

    auto scan = elements.subspan(0, std::min(elements.size(), kScanElements));
    for (const auto& element : scan) {
        std::string head = element.text.substr(0, kScanChars);
        std::smatch m;
        if (std::regex_search(head, m, year_ended)) {
            int year = std::stoi(m[3].str());
            if (plausible(year)) return year;
        }
    }
    for (const auto& element : scan) {
        std::string head = element.text.substr(0, kScanChars);
        for (std::sregex_iterator it(head.begin(), head.end(), annual_report), end; it != end; ++it) {
            int year = std::stoi((*it)[1].str());
            if (plausible(year)) return year;
        }
    }
    throw Error(ErrorCode::YearNotFound, "no reporting period statement in the first 200 elements");
}

int fiscal_year_from_filing_date(const edgar::Date& filing_date) {
    int year = static_cast<int>(filing_date.year());
    return static_cast<unsigned>(filing_date.month()) <= 6 ? year - 1 : year;
}

}  // namespace tenk::parser
