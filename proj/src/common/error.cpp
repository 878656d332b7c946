#include "tenk/error.hpp"

namespace tenk {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownTicker: return "UnknownTicker";
        case ErrorCode::UnknownCik: return "UnknownCik";
        case ErrorCode::NetworkError: return "NetworkError";
        case ErrorCode::RateLimitExceeded: return "RateLimitExceeded";
        case ErrorCode::MalformedResponse: return "MalformedResponse";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::CacheWriteError: return "CacheWriteError";
        case ErrorCode::NotHtml: return "NotHtml";
        case ErrorCode::EmptyDocument: return "EmptyDocument";
        case ErrorCode::YearNotFound: return "YearNotFound";
        case ErrorCode::NoSectionsFound: return "NoSectionsFound";
        case ErrorCode::NoNarrativeText: return "NoNarrativeText";
        case ErrorCode::UnparseableScore: return "UnparseableScore";
        case ErrorCode::AllChunksFailed: return "AllChunksFailed";
        case ErrorCode::ProviderFailure: return "ProviderFailure";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::StorageCorrupt: return "StorageCorrupt";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Validation: return "Validation";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownTicker:
        case ErrorCode::UnknownCik:
        case ErrorCode::InvalidArgument:
        case ErrorCode::Validation:
            return true;
        default:
            return false;
    }
}

}  // namespace tenk
