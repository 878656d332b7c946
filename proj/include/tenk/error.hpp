#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tenk {

enum class ErrorCode {
    // edgar
    UnknownTicker,
    UnknownCik,
    NetworkError,
    RateLimitExceeded,
    MalformedResponse,
    NotFound,
    CacheWriteError,
    // parser
    NotHtml,
    EmptyDocument,
    YearNotFound,
    NoSectionsFound,
    // grader / comparator
    NoNarrativeText,
    UnparseableScore,
    AllChunksFailed,
    ProviderFailure,
    // analytics
    DimensionMismatch,
    StorageCorrupt,
    // generic
    InvalidArgument,
    Validation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, HTTP layer) can map it to an exit code or status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Errors caused by bad caller input rather than by the environment.
bool is_validation_error(ErrorCode code) noexcept;

}  // namespace tenk
