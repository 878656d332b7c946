#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tenk/error.hpp"

namespace tenk::fs {

/// Writes to a sibling temp file and renames it over the target, so readers
/// never observe a partially written file. Failures raise `failure_code`.
void atomic_write(const std::filesystem::path& target, std::string_view bytes,
                  ErrorCode failure_code = ErrorCode::CacheWriteError);

std::optional<std::string> read_file(const std::filesystem::path& path);

/// Appends one line (a trailing newline is added) and flushes.
void append_line(const std::filesystem::path& path, std::string_view line);

std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace tenk::fs
