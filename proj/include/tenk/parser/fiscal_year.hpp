#pragma once

#include <span>

#include "tenk/edgar/types.hpp"
#include "tenk/parser/element.hpp"

namespace tenk::parser {

/// Scans the first 200 elements for the reporting period. The
/// "for the (fiscal) year ended {Month} {Day}, {Year}" form is tried first on
/// every element, then "annual report ... {Year}". Years outside
/// [1993, current year + 1] are ignored. Throws YearNotFound.
int extract_fiscal_year(std::span<const FilingElement> elements);

/// Used when no period statement exists: filings made in January-June are
/// assumed to cover the previous calendar year.
int fiscal_year_from_filing_date(const edgar::Date& filing_date);

}  // namespace tenk::parser
