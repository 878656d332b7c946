#include "tenk/edgar/types.hpp"

#include <cstdlib>
#include <regex>

#include "tenk/error.hpp"
#include "tenk/text.hpp"

namespace tenk::edgar {

using namespace std::chrono;

Date parse_date(std::string_view iso) {
    static const std::regex pattern(R"(^(\d{4})-(\d{2})-(\d{2})$)");
    std::string s(iso);
    std::smatch m;
    if (!std::regex_match(s, m, pattern)) throw Error(ErrorCode::InvalidArgument, "bad date '" + s + "'");
    Date date{year{std::stoi(m[1].str())}, month{static_cast<unsigned>(std::stoi(m[2].str()))},
              day{static_cast<unsigned>(std::stoi(m[3].str()))}};
    if (!date.ok()) throw Error(ErrorCode::InvalidArgument, "invalid calendar date '" + s + "'");
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Date today() { return Date{floor<days>(system_clock::now())}; }

Ticker Ticker::parse(std::string_view raw) {
    auto symbol = text::to_upper_ascii(text::normalize_whitespace(raw));
    static const std::regex pattern(R"(^[A-Z.\-]{1,10}$)");
    if (!std::regex_match(symbol, pattern)) {
        // Well-formed but longer than any listed symbol: cannot be registered.
        static const std::regex overlong(R"(^[A-Z.\-]{11,}$)");
        if (std::regex_match(symbol, overlong)) {
            throw Error(ErrorCode::UnknownTicker, "ticker " + symbol + " is not registered on EDGAR");
        }
        throw Error(ErrorCode::InvalidArgument, "invalid ticker '" + std::string(raw) + "'");
    }
    return Ticker(std::move(symbol));
}

Cik Cik::parse(std::string_view raw) {
    std::string s = text::to_upper_ascii(text::normalize_whitespace(raw));
    if (s.rfind("CIK", 0) == 0) s = s.substr(3);
    static const std::regex digits(R"(^\d{1,10}$)");
    if (!std::regex_match(s, digits)) throw Error(ErrorCode::InvalidArgument, "invalid CIK '" + std::string(raw) + "'");
    return from_number(std::stoull(s));
}

Cik Cik::from_number(std::uint64_t value) {
    if (value == 0 || value > 9'999'999'999ULL) {
        throw Error(ErrorCode::InvalidArgument, "CIK out of range: " + std::to_string(value));
    }
    std::string padded = std::to_string(value);
    padded.insert(0, 10 - padded.size(), '0');
    return Cik(std::move(padded));
}

std::uint64_t Cik::number() const noexcept { return std::stoull(value_); }

std::string Cik::unpadded() const { return std::to_string(number()); }

AccessionNumber AccessionNumber::parse(std::string_view raw) {
    std::string s = text::normalize_whitespace(raw);
    static const std::regex dashed(R"(^\d{10}-\d{2}-\d{6}$)");
    static const std::regex dashless(R"(^\d{18}$)");
    if (std::regex_match(s, dashed)) return AccessionNumber(s);
    if (std::regex_match(s, dashless)) {
        return AccessionNumber(s.substr(0, 10) + "-" + s.substr(10, 2) + "-" + s.substr(12));
    }
    throw Error(ErrorCode::InvalidArgument, "invalid accession number '" + s + "'");
}

std::string AccessionNumber::dashless() const {
    std::string out;
    out.reserve(18);
    for (char c : dashed_) {
        if (c != '-') out.push_back(c);
    }
    return out;
}

void FilingRef::validate() const {
    if (!filing_date.ok()) throw Error(ErrorCode::InvalidArgument, "filing date is not a calendar date");
    if (sys_days{filing_date} > sys_days{today()}) {
        throw Error(ErrorCode::InvalidArgument, "filing date " + format_date(filing_date) + " is in the future");
    }
    if (form_type.empty()) throw Error(ErrorCode::InvalidArgument, "empty form type");
    std::filesystem::path doc(primary_document);
    if (primary_document.empty() || doc.is_absolute()) {
        throw Error(ErrorCode::InvalidArgument, "bad primary document '" + primary_document + "'");
    }
    for (const auto& part : doc) {
        if (part == "..") throw Error(ErrorCode::InvalidArgument, "primary document escapes filing dir");
    }
}

void FetchPolicy::validate() const {
    if (!(max_requests_per_second > 0.0) || max_requests_per_second > 10.0) {
        throw Error(ErrorCode::Validation, "max_requests_per_second must be in (0, 10]");
    }
    if (!offline_mode && user_agent.find('@') == std::string::npos) {
        throw Error(ErrorCode::Validation, "user agent must carry a contact e-mail address");
    }
}

FetchPolicy FetchPolicy::from_env() {
    FetchPolicy policy;
    if (const char* ua = std::getenv("EDGAR_USER_AGENT")) policy.user_agent = ua;
    if (const char* dir = std::getenv("EDGAR_CACHE_DIR"); dir && *dir) policy.cache_dir = dir;
    if (const char* offline = std::getenv("EDGAR_OFFLINE")) policy.offline_mode = std::string(offline) == "1";
    return policy;
}

}  // namespace tenk::edgar
