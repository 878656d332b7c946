#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "tenk/edgar/types.hpp"
#include "tenk/grader/provider.hpp"

namespace tenk::service {

struct Settings {
    edgar::FetchPolicy fetch;
    std::filesystem::path data_dir = "./data";
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Built UI assets served under "/".
    std::filesystem::path static_dir = "./webapp/dist";
    std::size_t workers = 2;

    /// EDGAR_USER_AGENT, EDGAR_CACHE_DIR, EDGAR_OFFLINE, DATA_DIR, PORT,
    /// TENK_STATIC_DIR.
    static Settings from_env();
};

struct ProviderSpec {
    std::string kind = "stub";  // stub | replay | http
    std::string stub_answer = "1";
    std::optional<std::filesystem::path> stub_script;
    std::optional<std::filesystem::path> replay_dir;
    /// Wraps the provider so every exchange is recorded here.
    std::optional<std::filesystem::path> record_file;
    std::size_t max_concurrency = 4;
};

/// Builds the configured provider behind the global concurrency bound.
/// The http kind reads LLM_* from the environment.
std::shared_ptr<grader::CompletionProvider> make_provider(const ProviderSpec& spec);

}  // namespace tenk::service
