#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tenk::text {

/// Collapses runs of ASCII and Unicode spacing (NBSP, thin space, ...) into
/// one ASCII space and trims both ends.
std::string normalize_whitespace(std::string_view input);

bool is_valid_utf8(std::string_view bytes) noexcept;
std::string latin1_to_utf8(std::string_view bytes);

std::string to_upper_ascii(std::string_view s);
std::string to_lower_ascii(std::string_view s);

std::size_t codepoint_count(std::string_view utf8) noexcept;

/// Token estimate used everywhere a provider tokenizer is not available:
/// one token per four characters, rounded up.
std::size_t estimate_tokens(std::string_view utf8) noexcept;

/// Splits after '.', '!' or '?' (optionally followed by closing quotes or
/// brackets) when followed by whitespace. Terminators stay with their sentence.
std::vector<std::string> split_sentences(std::string_view text);

/// Longest prefix made of whole sentences whose token estimate fits the
/// budget. Falls back to a whitespace cut when the first sentence alone is
/// too long.
std::string truncate_to_tokens(std::string_view text, std::size_t max_tokens);

std::string join(const std::vector<std::string>& parts, std::string_view separator);

}  // namespace tenk::text
