#include "tenk/parser/section_locator.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>

#include "tenk/error.hpp"
#include "tenk/text.hpp"

namespace tenk::parser {
namespace {

constexpr std::size_t kHeadingScanChars = 80;
constexpr std::size_t kMaxHeadingTokens = 25;

std::string letters_upper(std::string_view s) {
    std::string out;
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (c >= 'a' && c <= 'z') out.push_back(static_cast<char>(c - 'a' + 'A'));
        else if (c >= 'A' && c <= 'Z') out.push_back(static_cast<char>(c));
    }
    return out;
}

std::optional<SectionId> item_from_match(const std::smatch& m) {
    int number = std::stoi(m[1].str());
    char letter = m[2].matched ? m[2].str()[0] : '\0';
    return section_from_item(number, letter);
}

std::vector<std::pair<SectionId, std::size_t>> item_references(const std::string& s) {
    static const std::regex reference(R"(\bitems?\s+(\d{1,2})([a-c])?\b)", std::regex::icase);
    std::vector<std::pair<SectionId, std::size_t>> out;
    for (std::sregex_iterator it(s.begin(), s.end(), reference), end; it != end; ++it) {
        if (auto id = item_from_match(*it)) out.emplace_back(*id, static_cast<std::size_t>(it->position()));
    }
    return out;
}

std::optional<SectionId> first_item_reference(const std::string& s) {
    auto refs = item_references(s);
    if (refs.empty()) return std::nullopt;
    return refs.front().first;
}

std::optional<SectionId> match_display_title(std::string_view s) {
    auto letters = letters_upper(s);
    if (letters.size() < 6) return std::nullopt;
    for (const auto& info : all_sections()) {
        if (info.id == SectionId::Unknown) continue;
        auto display = letters_upper(info.display);
        if (letters == display || (letters.size() >= 12 && display.rfind(letters, 0) == 0)) return info.id;
    }
    return std::nullopt;
}

std::size_t token_count(std::string_view s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), ' ')) + (s.empty() ? 0 : 1);
}

bool heading_shaped(const FilingElement& e) {
    return e.element_type != ElementType::NarrativeText && e.element_type != ElementType::Table &&
           e.element_type != ElementType::PageBreak && token_count(e.text) <= kMaxHeadingTokens;
}

// Longest subsequence increasing in both ordinal and item rank. Ties are
// broken towards later candidates so body headings beat TOC echoes.
std::vector<SectionStart> monotone_chain(std::vector<SectionStart> candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const SectionStart& a, const SectionStart& b) {
        return a.ordinal != b.ordinal ? a.ordinal < b.ordinal : a.section < b.section;
    });
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    const std::size_t n = candidates.size();
    if (n == 0) return {};
    std::vector<std::size_t> length(n, 1);
    std::vector<std::ptrdiff_t> previous(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (candidates[j].ordinal < candidates[i].ordinal && candidates[j].section < candidates[i].section &&
                length[j] + 1 >= length[i]) {
                if (length[j] + 1 > length[i] || static_cast<std::ptrdiff_t>(j) > previous[i]) {
                    length[i] = length[j] + 1;
                    previous[i] = static_cast<std::ptrdiff_t>(j);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (length[i] >= length[best]) best = i;
    }
    std::vector<SectionStart> chain;
    for (auto k = static_cast<std::ptrdiff_t>(best); k >= 0; k = previous[static_cast<std::size_t>(k)]) {
        chain.push_back(candidates[static_cast<std::size_t>(k)]);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

std::vector<SectionStart> toc_anchor_pass(const DocumentAnchors& anchors) {
    struct Resolved {
        SectionId section;
        std::size_t target;
    };
    std::map<std::size_t, std::vector<Resolved>> by_source;
    for (const auto& link : anchors.links) {
        auto target = anchors.targets.find(link.target);
        if (target == anchors.targets.end()) continue;
        auto item = first_item_reference(link.context);
        if (!item) item = first_item_reference(link.text);
        if (!item) item = match_display_title(link.text);
        if (item) by_source[link.source_ordinal].push_back({*item, target->second});
    }
    // Only TOC-like sources (several item links in one element) count; lone
    // cross references in the body would otherwise drag starts around.
    std::vector<SectionStart> candidates;
    for (const auto& [source, resolved] : by_source) {
        std::set<SectionId> distinct;
        for (const auto& r : resolved) distinct.insert(r.section);
        if (distinct.size() < 2) continue;
        for (const auto& r : resolved) {
            if (r.target > source) candidates.push_back({r.section, r.target});
        }
    }
    return monotone_chain(std::move(candidates));
}

std::vector<SectionStart> toc_text_pass(std::span<const FilingElement> elements) {
    std::size_t horizon = std::max<std::size_t>(1, elements.size() / 2);
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& toc = elements[t];
        if (toc.element_type == ElementType::NarrativeText) continue;
        auto refs = item_references(toc.text);
        std::vector<std::pair<SectionId, std::string>> listed;
        std::set<SectionId> seen;
        for (std::size_t r = 0; r < refs.size(); ++r) {
            if (!seen.insert(refs[r].first).second) continue;
            std::size_t begin = refs[r].second;
            std::size_t end = r + 1 < refs.size() ? refs[r + 1].second : toc.text.size();
            std::string title = toc.text.substr(begin, end - begin);
            static const std::regex noise(R"(^items?\s+\d{1,2}[a-c]?\.?|\bpart\s+[ivx]+\b|\d+)", std::regex::icase);
            listed.emplace_back(refs[r].first, letters_upper(std::regex_replace(title, noise, " ")));
        }
        if (listed.size() < 3) continue;

        std::vector<SectionStart> found;
        std::size_t cursor = t + 1;
        for (const auto& [section, title] : listed) {
            auto display = letters_upper(section_info(section).display);
            for (std::size_t k = cursor; k < elements.size(); ++k) {
                const auto& e = elements[k];
                if (!heading_shaped(e)) continue;
                auto letters = letters_upper(e.text);
                if (heading_item(e.text) == section || (!title.empty() && letters == title) || letters == display) {
                    found.push_back({section, e.ordinal});
                    cursor = k + 1;
                    break;
                }
            }
        }
        return monotone_chain(std::move(found));
    }
    return {};
}

std::vector<SectionStart> heading_regex_pass(std::span<const FilingElement> elements) {
    std::vector<SectionStart> candidates;
    for (const auto& e : elements) {
        if (e.element_type != ElementType::Title) continue;
        if (auto item = heading_item(e.text)) candidates.push_back({*item, e.ordinal});
    }
    return monotone_chain(std::move(candidates));
}

}  // namespace

std::optional<SectionId> heading_item(std::string_view text) {
    static const std::regex heading(R"(^items?\s+(\d{1,2})([a-c])?\b)", std::regex::icase);
    std::string head(text.substr(0, std::min(text.size(), kHeadingScanChars)));
    std::smatch m;
    if (!std::regex_search(head, m, heading)) return std::nullopt;
    return item_from_match(m);
}

SectionLocation locate_sections_detailed(std::span<const FilingElement> elements, const DocumentAnchors* anchors) {
    SectionLocation best;
    auto consider = [&](std::vector<SectionStart> starts, LocatorPass pass) {
        if (starts.size() > best.starts.size()) best = SectionLocation{std::move(starts), pass};
    };
    if (anchors) consider(toc_anchor_pass(*anchors), LocatorPass::TocAnchors);
    consider(toc_text_pass(elements), LocatorPass::TocText);
    consider(heading_regex_pass(elements), LocatorPass::HeadingRegex);
    if (best.starts.size() < 2) {
        throw Error(ErrorCode::NoSectionsFound,
                    "only " + std::to_string(best.starts.size()) + " item heading(s) detected");
    }
    return best;
}

std::vector<SectionStart> locate_sections(std::span<const FilingElement> elements, const DocumentAnchors* anchors) {
    return locate_sections_detailed(elements, anchors).starts;
}

std::vector<FilingElement> assign_sections(std::vector<FilingElement> elements, std::span<const SectionStart> starts) {
    for (std::size_t i = 1; i < starts.size(); ++i) {
        if (starts[i].ordinal <= starts[i - 1].ordinal) {
            throw Error(ErrorCode::InvalidArgument, "section starts must be strictly increasing");
        }
    }
    std::size_t next = 0;
    SectionId current = SectionId::Unknown;
    for (auto& e : elements) {
        while (next < starts.size() && starts[next].ordinal <= e.ordinal) current = starts[next++].section;
        e.section = current;
    }
    return elements;
}

}  // namespace tenk::parser
