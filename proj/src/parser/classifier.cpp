#include "tenk/parser/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <string>
#include <unordered_set>

#include "tenk/text.hpp"

namespace tenk::parser {
namespace {

// Common English verbs in base form plus the irregular forms the suffix rules
// cannot recover.
constexpr std::array<std::string_view, 340> kVerbs{
    "accept", "achieve", "acquire", "act", "add", "address", "adjust", "adopt", "affect", "agree",
    "aim", "allow", "amend", "announce", "anticipate", "appear", "apply", "approve", "arise", "arose",
    "assess", "assist", "assume", "attract", "avoid", "base", "be", "am", "is", "are",
    "was", "were", "been", "become", "became", "began", "begin", "begun", "believe", "benefit",
    "borrow", "bought", "brought", "build", "built", "buy", "calculate", "came", "can", "cannot",
    "carry", "cause", "change", "choose", "chose", "claim", "close", "collect", "come", "commit",
    "compare", "compete", "complete", "comply", "conduct", "consider", "consist", "constitute", "construct", "contain",
    "continue", "contribute", "control", "convert", "could", "create", "decide", "decline", "decrease", "deduct",
    "defer", "define", "deliver", "depend", "derive", "describe", "design", "determine", "develop", "did",
    "disclose", "distribute", "do", "does", "done", "drive", "driven", "drove", "earn", "effect",
    "eliminate", "employ", "enable", "encourage", "engage", "ensure", "enter", "establish", "estimate", "evaluate",
    "exceed", "execute", "exist", "expand", "expect", "experience", "explore", "extend", "extract", "face",
    "fail", "fall", "fell", "file", "finance", "find", "focus", "follow", "found", "fund",
    "gain", "generate", "get", "give", "given", "go", "gone", "got", "grant", "grew",
    "grow", "grown", "guarantee", "had", "happen", "has", "have", "held", "help", "hire",
    "hold", "identify", "impact", "implement", "improve", "include", "incorporate", "increase", "incur", "indicate",
    "influence", "inform", "intend", "introduce", "invest", "involve", "issue", "keep", "kept", "know",
    "known", "launch", "lead", "learn", "lease", "led", "left", "lend", "let", "limit",
    "lose", "lost", "made", "maintain", "make", "manage", "manufacture", "may", "mean", "meant",
    "measure", "meet", "met", "might", "mine", "mitigate", "monitor", "must", "need", "negotiate",
    "obtain", "occur", "offer", "offset", "operate", "own", "paid", "participate", "pay", "perform",
    "permit", "place", "plan", "prepare", "present", "prevent", "process", "produce", "promote", "protect",
    "provide", "publish", "purchase", "pursue", "put", "raise", "ran", "reach", "realize", "receive",
    "recognize", "recommend", "record", "reduce", "reflect", "regard", "regulate", "relate", "release", "rely",
    "remain", "remove", "repay", "replace", "report", "represent", "repurchase", "require", "reside", "resolve",
    "respond", "restrict", "result", "retain", "return", "review", "rise", "risen", "rose", "run",
    "said", "saw", "say", "see", "seek", "seem", "sell", "sent", "serve", "set",
    "settle", "shall", "ship", "should", "show", "shown", "sign", "sold", "spend", "spent",
    "start", "state", "stay", "strengthen", "subject", "submit", "succeed", "suffer", "supply", "support",
    "sustain", "take", "taken", "target", "tell", "tend", "terminate", "think", "thought", "took",
    "track", "train", "transfer", "transform", "treat", "trust", "try", "undergo", "understand", "undertake",
    "use", "utilize", "value", "vary", "want", "went", "will", "win", "won", "work",
    "would", "write", "written", "wrote", "yield", "allocate", "attribute", "classify", "concentrate", "recover",
    "secure", "enhance", "expose", "hedge", "license", "market", "mature", "modify", "owe", "grade",
};

const std::unordered_set<std::string_view>& verb_set() {
    static const std::unordered_set<std::string_view> set(kVerbs.begin(), kVerbs.end());
    return set;
}

bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }

std::string_view strip_punct(std::string_view token) {
    while (!token.empty() && !is_alpha(static_cast<unsigned char>(token.front())) &&
           !std::isdigit(static_cast<unsigned char>(token.front())))
        token.remove_prefix(1);
    while (!token.empty() && !is_alpha(static_cast<unsigned char>(token.back())) &&
           !std::isdigit(static_cast<unsigned char>(token.back())))
        token.remove_suffix(1);
    return token;
}

bool all_caps(std::string_view word) {
    std::size_t letters = 0;
    for (char ch : word) {
        auto c = static_cast<unsigned char>(ch);
        if (is_lower(c)) return false;
        if (is_upper(c)) ++letters;
    }
    return letters > 1;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool starts_with_bullet(std::string_view text) {
    static constexpr std::array<std::string_view, 8> kBullets{"•", "●", "·", "◦",
                                                              "▪", "– ", "- ", "* "};
    return std::any_of(kBullets.begin(), kBullets.end(), [&](std::string_view b) { return text.rfind(b, 0) == 0; });
}

}  // namespace

bool is_verb_lexicon_word(std::string_view lowercase_word) { return verb_set().count(lowercase_word) > 0; }

TextFeatures analyze_text(std::string_view text) {
    TextFeatures features;
    std::size_t letters = 0;
    std::size_t visible = 0;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        // Continuation bytes belong to the code point already counted.
        if ((c & 0xC0) == 0x80) continue;
        ++visible;
        if (is_alpha(c) || c >= 0xC0) ++letters;
    }
    features.alpha_ratio = visible == 0 ? 0.0 : static_cast<double>(letters) / static_cast<double>(visible);

    std::size_t capitalized_inner = 0;
    bool sentence_start = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') ++pos;
        if (pos >= text.size()) break;
        std::size_t end = text.find(' ', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        pos = end;
        ++features.tokens;

        std::string_view word = strip_punct(raw);
        bool initial = sentence_start;
        char last = raw.back();
        sentence_start = last == '.' || last == '!' || last == '?';
        if (word.empty() || !is_alpha(static_cast<unsigned char>(word.front()))) continue;

        bool capitalized = is_upper(static_cast<unsigned char>(word.front()));
        if (capitalized && !initial) ++capitalized_inner;

        auto lower = text::to_lower_ascii(word);
        if (!all_caps(word) && is_verb_lexicon_word(lower)) {
            ++features.verb_evidence;
        } else if (!capitalized && lower.size() > 3 &&
                   std::all_of(lower.begin(), lower.end(), [](unsigned char c) { return is_lower(c) || c == '-'; }) &&
                   (ends_with(lower, "ed") || ends_with(lower, "ing") ||
                    (ends_with(lower, "s") && !ends_with(lower, "ss")))) {
            ++features.verb_evidence;
        }
    }
    features.proper_noun_ratio =
        features.tokens == 0 ? 0.0 : static_cast<double>(capitalized_inner) / static_cast<double>(features.tokens);
    return features;
}

ElementType classify_element(std::string_view text, MarkupHint hint, const ClassifierConfig& config) {
    switch (hint) {
        case MarkupHint::Heading: return ElementType::Title;
        case MarkupHint::ListItem: return ElementType::ListItem;
        case MarkupHint::Table: return ElementType::Table;
        case MarkupHint::None: break;
    }
    if (starts_with_bullet(text)) return ElementType::ListItem;

    auto f = analyze_text(text);
    if (f.verb_evidence >= config.min_verb_evidence && f.proper_noun_ratio <= config.max_proper_noun_ratio &&
        f.tokens >= config.min_tokens && f.alpha_ratio >= config.min_alpha_ratio) {
        return ElementType::NarrativeText;
    }

    auto first_alpha = std::find_if(text.begin(), text.end(), [](char c) { return is_alpha(static_cast<unsigned char>(c)); });
    bool capital_start = first_alpha != text.end() && is_upper(static_cast<unsigned char>(*first_alpha));
    char last = text.empty() ? ' ' : text.back();
    if (f.alpha_ratio >= config.min_alpha_ratio && f.tokens <= config.max_title_tokens && capital_start &&
        last != ',' && last != ';') {
        return ElementType::Title;
    }
    return ElementType::Uncategorized;
}

}  // namespace tenk::parser
