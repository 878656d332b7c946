#include "tenk/text.hpp"

#include <algorithm>

namespace tenk::text {
namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Width in bytes of a Unicode space sequence starting at i, 0 if none.
std::size_t unicode_space_width(std::string_view s, std::size_t i) {
    auto at = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    if (i + 1 < s.size() && at(i) == 0xC2 && at(i + 1) == 0xA0) return 2;  // NBSP
    if (i + 2 < s.size() && at(i) == 0xE2 && at(i + 1) == 0x80) {
        unsigned char c = at(i + 2);
        if ((c >= 0x80 && c <= 0x8B) || c == 0xAF) return 3;  // en/em/thin/zero-width, narrow NBSP
    }
    if (i + 2 < s.size() && at(i) == 0xE3 && at(i + 1) == 0x80 && at(i + 2) == 0x80) return 3;
    return 0;
}

}  // namespace

std::string normalize_whitespace(std::string_view input) {
    std::string out;
    out.reserve(input.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < input.size();) {
        auto c = static_cast<unsigned char>(input[i]);
        std::size_t width = is_ascii_space(c) ? 1 : unicode_space_width(input, i);
        if (width > 0) {
            pending_space = !out.empty();
            i += width;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(input[i]);
        ++i;
    }
    return out;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
    std::size_t i = 0;
    while (i < bytes.size()) {
        auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= bytes.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

std::string latin1_to_utf8(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size() + bytes.size() / 8);
    for (char ch : bytes) {
        auto c = static_cast<unsigned char>(ch);
        if (c < 0x80) {
            out.push_back(ch);
        } else {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

std::string to_upper_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
    });
    return out;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    return out;
}

std::size_t codepoint_count(std::string_view utf8) noexcept {
    return static_cast<std::size_t>(std::count_if(utf8.begin(), utf8.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

std::size_t estimate_tokens(std::string_view utf8) noexcept {
    return (codepoint_count(utf8) + 3) / 4;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t end = i + 1;
            while (end < text.size() && (text[end] == '"' || text[end] == '\'' || text[end] == ')' ||
                                         text[end] == ']' || text[end] == '.')) {
                ++end;
            }
            if (end >= text.size() || is_ascii_space(static_cast<unsigned char>(text[end]))) {
                auto piece = normalize_whitespace(text.substr(start, end - start));
                if (!piece.empty()) sentences.push_back(std::move(piece));
                start = end;
            }
            i = end;
            continue;
        }
        ++i;
    }
    if (start < text.size()) {
        auto piece = normalize_whitespace(text.substr(start));
        if (!piece.empty()) sentences.push_back(std::move(piece));
    }
    return sentences;
}

std::string truncate_to_tokens(std::string_view text, std::size_t max_tokens) {
    if (estimate_tokens(text) <= max_tokens) return std::string(text);
    std::string out;
    for (const auto& sentence : split_sentences(text)) {
        std::string candidate = out.empty() ? sentence : out + " " + sentence;
        if (estimate_tokens(candidate) > max_tokens) break;
        out = std::move(candidate);
    }
    if (!out.empty()) return out;

    // No whole sentence fits: cut at the last space inside the byte budget.
    std::size_t byte_budget = max_tokens * 4;
    std::string_view head = text.substr(0, std::min(text.size(), byte_budget));
    while (!head.empty() && head.size() < text.size() &&
           (static_cast<unsigned char>(text[head.size()]) & 0xC0) == 0x80) {
        head.remove_suffix(1);
    }
    auto space = head.find_last_of(' ');
    if (space != std::string_view::npos && space > 0) head = head.substr(0, space);
    return normalize_whitespace(head);
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.append(separator);
        out.append(parts[i]);
    }
    return out;
}

}  // namespace tenk::text
