#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace tenk::edgar {

using Date = std::chrono::year_month_day;

/// Parses `YYYY-MM-DD`; throws InvalidArgument on anything else.
Date parse_date(std::string_view iso);
std::string format_date(const Date& date);
Date today();

/// Exchange symbol, uppercased, `^[A-Z.\-]{1,10}$`.
class Ticker {
public:
    static Ticker parse(std::string_view raw);

    const std::string& symbol() const noexcept { return symbol_; }
    auto operator<=>(const Ticker&) const = default;

private:
    explicit Ticker(std::string symbol) : symbol_(std::move(symbol)) {}
    std::string symbol_;
};

/// Central Index Key, always held as a 10-digit zero-padded string.
class Cik {
public:
    /// Accepts "320193", "0000320193" or "CIK0000320193".
    static Cik parse(std::string_view raw);
    static Cik from_number(std::uint64_t value);

    const std::string& value() const noexcept { return value_; }
    std::uint64_t number() const noexcept;
    /// Form used in archive paths: no leading zeros.
    std::string unpadded() const;

    auto operator<=>(const Cik&) const = default;

private:
    explicit Cik(std::string value) : value_(std::move(value)) {}
    std::string value_;
};

/// `##########-##-######`; the 18-digit dashless form maps back one-to-one.
class AccessionNumber {
public:
    /// Accepts either the dashed or the dashless rendering.
    static AccessionNumber parse(std::string_view raw);

    const std::string& dashed() const noexcept { return dashed_; }
    std::string dashless() const;

    auto operator<=>(const AccessionNumber&) const = default;

private:
    explicit AccessionNumber(std::string dashed) : dashed_(std::move(dashed)) {}
    std::string dashed_;
};

struct FilingRef {
    Cik cik;
    AccessionNumber accession;
    std::string form_type;
    Date filing_date;
    std::string primary_document;
    std::optional<Date> report_date;
    std::optional<int> fiscal_year;

    /// Throws InvalidArgument when the date lies in the future or the
    /// document path is absolute or climbs out of the filing directory.
    void validate() const;
};

struct FetchPolicy {
    double max_requests_per_second = 10.0;
    std::string user_agent;
    std::filesystem::path cache_dir = "./cache";
    bool offline_mode = false;
    /// Ticker map and submission listings younger than this are reused
    /// without a network round trip.
    std::chrono::seconds metadata_max_age{24 * 3600};

    /// Enforces 0 < rate <= 10 and, unless offline, an '@' contact in the
    /// user agent.
    void validate() const;

    /// Reads EDGAR_USER_AGENT (required), EDGAR_CACHE_DIR, EDGAR_OFFLINE.
    static FetchPolicy from_env();
};

}  // namespace tenk::edgar
