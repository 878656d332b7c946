#include "tenk/parser/html_partitioner.hpp"

#include <algorithm>
#include <optional>
#include <regex>
#include <unordered_map>
#include <unordered_set>

#include "tenk/error.hpp"
#include "tenk/text.hpp"

namespace tenk::parser {
namespace {

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::unordered_map<std::string, std::string> attrs;
    std::size_t end = 0;  // one past '>'

    std::string attr(const std::string& key) const {
        auto it = attrs.find(key);
        return it == attrs.end() ? std::string() : it->second;
    }
};

const std::unordered_set<std::string_view> kBlockTags{
    "address", "article", "aside", "blockquote", "body", "caption", "center", "dd", "div", "dl",
    "dt", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5",
    "h6", "header", "html", "li", "main", "nav", "ol", "p", "pre", "section",
    "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul", "document", "text",
};

const std::unordered_set<std::string_view> kVoidTags{
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr",
};

// Containers whose whole subtree is dropped.
const std::unordered_set<std::string_view> kSkipTags{
    "head", "title", "noscript", "template", "ix:header", "xbrl", "svg", "object", "select",
};

const std::unordered_set<std::string_view> kRawTextTags{"script", "style"};

const std::unordered_set<std::string_view> kImplicitlyClosing{"p", "li", "tr", "td", "th", "dt", "dd"};

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '-' || c == '_' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::optional<Tag> parse_tag(std::string_view s, std::size_t pos) {
    Tag tag;
    std::size_t j = pos + 1;
    if (j < s.size() && s[j] == '/') {
        tag.closing = true;
        ++j;
    }
    if (j >= s.size() || !std::isalpha(static_cast<unsigned char>(s[j]))) return std::nullopt;
    std::size_t name_start = j;
    while (j < s.size() && is_name_char(s[j])) ++j;
    tag.name = text::to_lower_ascii(s.substr(name_start, j - name_start));

    while (j < s.size()) {
        while (j < s.size() && is_space(s[j])) ++j;
        if (j >= s.size()) return std::nullopt;
        if (s[j] == '>') {
            tag.end = j + 1;
            return tag;
        }
        if (s[j] == '/' && j + 1 < s.size() && s[j + 1] == '>') {
            tag.self_closing = true;
            tag.end = j + 2;
            return tag;
        }
        std::size_t attr_start = j;
        while (j < s.size() && !is_space(s[j]) && s[j] != '=' && s[j] != '>' && !(s[j] == '/' && j + 1 < s.size() && s[j + 1] == '>')) ++j;
        if (j == attr_start) {
            ++j;  // stray character such as a lone '/'
            continue;
        }
        std::string key = text::to_lower_ascii(s.substr(attr_start, j - attr_start));
        while (j < s.size() && is_space(s[j])) ++j;
        std::string value;
        if (j < s.size() && s[j] == '=') {
            ++j;
            while (j < s.size() && is_space(s[j])) ++j;
            if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
                char quote = s[j++];
                auto close = s.find(quote, j);
                if (close == std::string_view::npos) return std::nullopt;
                value = std::string(s.substr(j, close - j));
                j = close + 1;
            } else {
                std::size_t v = j;
                while (j < s.size() && !is_space(s[j]) && s[j] != '>') ++j;
                value = std::string(s.substr(v, j - v));
            }
        }
        tag.attrs.emplace(std::move(key), decode_entities(value));
    }
    return std::nullopt;
}

std::string squeeze_lower(std::string_view style) {
    std::string out;
    for (char c : style) {
        if (!is_space(c)) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool is_hidden(const Tag& tag) {
    auto style = squeeze_lower(tag.attr("style"));
    return style.find("display:none") != std::string::npos || tag.attrs.count("hidden") > 0;
}

bool breaks_before(const Tag& tag) {
    auto style = squeeze_lower(tag.attr("style"));
    return style.find("page-break-before:always") != std::string::npos ||
           style.find("break-before:page") != std::string::npos;
}

bool breaks_after(const Tag& tag) {
    auto style = squeeze_lower(tag.attr("style"));
    return style.find("page-break-after:always") != std::string::npos ||
           style.find("break-after:page") != std::string::npos;
}

bool is_heading(std::string_view name) {
    return name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6';
}

class Builder {
public:
    explicit Builder(const ClassifierConfig& config) : config_(config) {}

    void text(std::string_view decoded) {
        if (link_) link_->text.append(decoded);
        if (table_depth_ > 0) {
            cell_.append(decoded);
        } else {
            buffer_.append(decoded);
        }
    }

    void open(const Tag& tag) {
        const auto& name = tag.name;
        if (kImplicitlyClosing.count(name) && !stack_.empty() && stack_.back().name == name) close(name);

        if (breaks_before(tag) || name == "hr") page_break();

        if (name == "table") {
            if (table_depth_ == 0) {
                flush_block();
                rows_.clear();
                row_.clear();
                cell_.clear();
                table_links_begin_ = doc_.anchors.links.size();
            }
            ++table_depth_;
        } else if (table_depth_ > 0) {
            if (name == "td" || name == "th") finish_cell();
            if (name == "tr") finish_row();
        } else if (kBlockTags.count(name)) {
            flush_block();
        }

        if (name == "br") text(" ");

        auto id = tag.attr("id");
        if (id.empty() && name == "a") id = tag.attr("name");
        if (!id.empty()) pending_anchors_.push_back(id);

        if (name == "a") {
            auto href = tag.attr("href");
            if (href.size() > 1 && href.front() == '#') link_ = InternalLink{href.substr(1), {}, {}, 0};
        }

        if (!tag.self_closing && !kVoidTags.count(name)) stack_.push_back(Open{name, breaks_after(tag)});
    }

    void close(std::string_view name) {
        auto it = std::find_if(stack_.rbegin(), stack_.rend(), [&](const Open& o) { return o.name == name; });
        if (it == stack_.rend()) return;
        std::size_t target = static_cast<std::size_t>(std::distance(it, stack_.rend())) - 1;
        while (stack_.size() > target) {
            Open top = stack_.back();
            close_effects(top);
            stack_.pop_back();
            if (top.name == "table") {
                --table_depth_;
                if (table_depth_ == 0) emit_table();
            }
            if (top.break_after) page_break();
        }
    }

    PartitionedDocument finish() {
        while (!stack_.empty()) close(stack_.back().name);
        flush_block();
        if (table_depth_ > 0) {
            table_depth_ = 0;
            emit_table();
        }
        while (!doc_.elements.empty() && doc_.elements.back().element_type == ElementType::PageBreak) {
            doc_.elements.pop_back();
        }
        return std::move(doc_);
    }

private:
    struct Open {
        std::string name;
        bool break_after = false;
    };

    void close_effects(const Open& top) {
        if (top.name == "a" && link_) {
            link_->text = text::normalize_whitespace(link_->text);
            doc_.anchors.links.push_back(std::move(*link_));
            if (table_depth_ == 0) block_links_.push_back(doc_.anchors.links.size() - 1);
            else row_links_.push_back(doc_.anchors.links.size() - 1);
            link_.reset();
        }
        if (table_depth_ > 0) {
            if (top.name == "td" || top.name == "th") finish_cell();
            if (top.name == "tr") finish_row();
        } else if (kBlockTags.count(top.name)) {
            flush_block();
        }
    }

    MarkupHint block_hint() const {
        bool heading = false;
        bool list = false;
        for (const auto& o : stack_) {
            heading = heading || is_heading(o.name);
            list = list || o.name == "li";
        }
        if (heading) return MarkupHint::Heading;
        if (list) return MarkupHint::ListItem;
        return MarkupHint::None;
    }

    bool in_pre() const {
        return std::any_of(stack_.begin(), stack_.end(), [](const Open& o) { return o.name == "pre"; });
    }

    void flush_block() {
        if (table_depth_ > 0) return;
        std::string raw = std::move(buffer_);
        buffer_.clear();
        std::vector<std::size_t> links = std::move(block_links_);
        block_links_.clear();

        std::optional<std::size_t> first;
        if (in_pre()) {
            static const std::regex blank_line(R"(\n[ \t\r]*\n)");
            for (std::sregex_token_iterator it(raw.begin(), raw.end(), blank_line, -1), end; it != end; ++it) {
                auto ordinal = emit(it->str(), MarkupHint::None);
                if (!first) first = ordinal;
            }
        } else {
            first = emit(raw, block_hint());
        }
        auto context = text::normalize_whitespace(raw);
        for (auto index : links) {
            doc_.anchors.links[index].context = context;
            doc_.anchors.links[index].source_ordinal = first.value_or(doc_.elements.size());
        }
    }

    void finish_cell() {
        auto cell = text::normalize_whitespace(cell_);
        cell_.clear();
        if (!cell.empty()) row_.push_back(std::move(cell));
    }

    void finish_row() {
        finish_cell();
        auto row_text = text::join(row_, " ");
        for (auto index : row_links_) doc_.anchors.links[index].context = row_text;
        row_links_.clear();
        if (!row_.empty()) rows_.push_back(std::move(row_));
        row_.clear();
    }

    void emit_table() {
        finish_row();
        std::optional<std::size_t> ordinal;
        if (rows_.size() == 1) {
            // Single-row tables are layout (headings, bullets) rather than data.
            ordinal = emit(text::join(rows_.front(), " "), MarkupHint::None);
        } else if (!rows_.empty()) {
            std::vector<std::string> lines;
            lines.reserve(rows_.size());
            for (const auto& row : rows_) lines.push_back(text::join(row, " "));
            ordinal = emit(text::join(lines, " "), MarkupHint::Table);
        }
        for (std::size_t i = table_links_begin_; i < doc_.anchors.links.size(); ++i) {
            doc_.anchors.links[i].source_ordinal = ordinal.value_or(doc_.elements.size());
        }
        rows_.clear();
    }

    std::optional<std::size_t> emit(std::string_view raw, MarkupHint hint) {
        auto normalized = text::normalize_whitespace(raw);
        if (normalized.empty()) return std::nullopt;
        std::size_t ordinal = doc_.elements.size();
        auto type = classify_element(normalized, hint, config_);
        doc_.elements.push_back(FilingElement{ordinal, type, std::move(normalized), SectionId::Unknown});
        for (auto& id : pending_anchors_) doc_.anchors.targets.emplace(std::move(id), ordinal);
        pending_anchors_.clear();
        return ordinal;
    }

    void page_break() {
        flush_block();
        if (table_depth_ > 0 || doc_.elements.empty() ||
            doc_.elements.back().element_type == ElementType::PageBreak) {
            return;
        }
        std::size_t ordinal = doc_.elements.size();
        doc_.elements.push_back(
            FilingElement{ordinal, ElementType::PageBreak, std::string(kPageBreakText), SectionId::Unknown});
    }

    const ClassifierConfig& config_;
    PartitionedDocument doc_;
    std::vector<Open> stack_;
    std::string buffer_;
    int table_depth_ = 0;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> row_;
    std::string cell_;
    std::size_t table_links_begin_ = 0;
    std::optional<InternalLink> link_;
    std::vector<std::size_t> block_links_;
    std::vector<std::size_t> row_links_;
    std::vector<std::string> pending_anchors_;
};

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Numeric references in the C1 range are Windows-1252 in legacy filings.
char32_t windows_1252(char32_t cp) {
    static const std::unordered_map<char32_t, char32_t> kMap{
        {0x80, 0x20AC}, {0x85, 0x2026}, {0x91, 0x2018}, {0x92, 0x2019}, {0x93, 0x201C},
        {0x94, 0x201D}, {0x95, 0x2022}, {0x96, 0x2013}, {0x97, 0x2014}, {0x99, 0x2122},
    };
    auto it = kMap.find(cp);
    return it == kMap.end() ? cp : it->second;
}

const std::unordered_map<std::string_view, char32_t>& named_entities() {
    static const std::unordered_map<std::string_view, char32_t> kNamed{
        {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
        {"nbsp", 0xA0},    {"ensp", 0x2002},  {"emsp", 0x2003},  {"thinsp", 0x2009}, {"zwsp", 0x200B},
        {"shy", 0xAD},     {"rsquo", 0x2019}, {"lsquo", 0x2018}, {"rdquo", 0x201D}, {"ldquo", 0x201C},
        {"mdash", 0x2014}, {"ndash", 0x2013}, {"bull", 0x2022},  {"middot", 0xB7},  {"hellip", 0x2026},
        {"reg", 0xAE},     {"trade", 0x2122}, {"copy", 0xA9},    {"sect", 0xA7},    {"para", 0xB6},
        {"cent", 0xA2},    {"pound", 0xA3},   {"euro", 0x20AC},  {"yen", 0xA5},     {"deg", 0xB0},
        {"plusmn", 0xB1},  {"times", 0xD7},   {"divide", 0xF7},  {"frac12", 0xBD},  {"frac14", 0xBC},
        {"frac34", 0xBE},  {"laquo", 0xAB},   {"raquo", 0xBB},   {"dagger", 0x2020}, {"Dagger", 0x2021},
        {"eacute", 0xE9},  {"egrave", 0xE8},  {"agrave", 0xE0},  {"aacute", 0xE1},  {"ntilde", 0xF1},
        {"ouml", 0xF6},    {"uuml", 0xFC},    {"auml", 0xE4},    {"ccedil", 0xE7},  {"check", 0x2713},
    };
    return kNamed;
}

}  // namespace

std::string decode_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size();) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        auto semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(in[i++]);
            continue;
        }
        auto name = in.substr(i + 1, semi - i - 1);
        std::optional<char32_t> cp;
        if (!name.empty() && name[0] == '#') {
            try {
                std::size_t used = 0;
                bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
                std::string digits(name.substr(hex ? 2 : 1));
                unsigned long value = std::stoul(digits, &used, hex ? 16 : 10);
                if (used == digits.size() && value > 0 && value <= 0x10FFFF) cp = windows_1252(static_cast<char32_t>(value));
            } catch (const std::exception&) {
            }
        } else {
            auto it = named_entities().find(name);
            if (it != named_entities().end()) cp = it->second;
        }
        if (!cp) {
            out.push_back(in[i++]);
            continue;
        }
        if (*cp != 0xAD) append_utf8(out, *cp);
        i = semi + 1;
    }
    return out;
}

PartitionedDocument partition_document(std::string_view raw, const ClassifierConfig& config) {
    std::string decoded = text::is_valid_utf8(raw) ? std::string(raw) : text::latin1_to_utf8(raw);
    if (decoded.rfind("\xEF\xBB\xBF", 0) == 0) decoded.erase(0, 3);
    std::string_view doc = decoded;

    Builder builder(config);
    bool saw_markup = false;
    std::string skip_tag;
    int skip_depth = 0;

    std::size_t i = 0;
    while (i < doc.size()) {
        if (doc[i] != '<') {
            auto next = doc.find('<', i);
            if (next == std::string_view::npos) next = doc.size();
            if (skip_depth == 0) builder.text(decode_entities(doc.substr(i, next - i)));
            i = next;
            continue;
        }
        if (doc.compare(i, 4, "<!--") == 0) {
            auto end = doc.find("-->", i + 4);
            i = end == std::string_view::npos ? doc.size() : end + 3;
            saw_markup = true;
            continue;
        }
        if (i + 1 < doc.size() && (doc[i + 1] == '!' || doc[i + 1] == '?')) {
            auto end = doc.find('>', i);
            i = end == std::string_view::npos ? doc.size() : end + 1;
            saw_markup = true;
            continue;
        }
        auto tag = parse_tag(doc, i);
        if (!tag) {
            if (skip_depth == 0) builder.text("<");
            ++i;
            continue;
        }
        saw_markup = true;
        i = tag->end;
        bool is_void = tag->self_closing || kVoidTags.count(tag->name) > 0;

        if (skip_depth > 0) {
            if (tag->name == skip_tag) {
                if (tag->closing) --skip_depth;
                else if (!is_void) ++skip_depth;
            }
            continue;
        }
        if (!tag->closing && kRawTextTags.count(tag->name)) {
            if (tag->self_closing) continue;
            std::string needle = "</" + tag->name;
            auto rest = doc.substr(i);
            auto hit = std::search(rest.begin(), rest.end(), needle.begin(), needle.end(), [](char a, char b) {
                return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
            });
            if (hit == rest.end()) {
                i = doc.size();
            } else {
                auto gt = doc.find('>', i + static_cast<std::size_t>(hit - rest.begin()));
                i = gt == std::string_view::npos ? doc.size() : gt + 1;
            }
            continue;
        }
        if (!tag->closing && (kSkipTags.count(tag->name) || is_hidden(*tag))) {
            if (!is_void) {
                skip_tag = tag->name;
                skip_depth = 1;
            }
            continue;
        }
        if (tag->closing) {
            builder.close(tag->name);
        } else {
            builder.open(*tag);
        }
    }

    if (!saw_markup) throw Error(ErrorCode::NotHtml, "input contains no markup");
    auto result = builder.finish();
    bool has_text = std::any_of(result.elements.begin(), result.elements.end(),
                                [](const FilingElement& e) { return e.element_type != ElementType::PageBreak; });
    if (!has_text) throw Error(ErrorCode::EmptyDocument, "no visible text in document");
    return result;
}

std::vector<FilingElement> partition_html(std::string_view raw, const ClassifierConfig& config) {
    return partition_document(raw, config).elements;
}

}  // namespace tenk::parser
