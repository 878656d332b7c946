#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tenk::csv {

/// RFC 4180 field. `force_quotes` wraps even fields that need no quoting.
std::string field(std::string_view value, bool force_quotes = false);

/// One record of raw values, each encoded with field(), terminated by CRLF.
/// `force_quotes[i]` forces quoting of column i.
std::string row(const std::vector<std::string>& fields, const std::vector<bool>& force_quotes = {});

/// Parses RFC 4180 text (CRLF or LF line ends, quoted fields may span
/// lines). Throws InvalidArgument on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view data);

}  // namespace tenk::csv
