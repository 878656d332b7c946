#pragma once

#include <cstddef>
#include <string_view>

#include "tenk/parser/element.hpp"

namespace tenk::parser {

/// Structural role implied by the enclosing markup.
enum class MarkupHint { None, Heading, ListItem, Table };

/// Thresholds of the narrative test. A text block is NarrativeText iff
/// verb_evidence >= min_verb_evidence, proper_noun_ratio <= max_proper_noun_ratio,
/// tokens >= min_tokens and alpha_ratio >= min_alpha_ratio.
struct ClassifierConfig {
    std::size_t min_verb_evidence = 1;
    double max_proper_noun_ratio = 0.5;
    std::size_t min_tokens = 5;
    double min_alpha_ratio = 0.5;
    /// Non-narrative blocks up to this length that start with a capital are titles.
    std::size_t max_title_tokens = 20;
};

struct TextFeatures {
    std::size_t tokens = 0;
    std::size_t verb_evidence = 0;
    double proper_noun_ratio = 0.0;
    double alpha_ratio = 0.0;
};

TextFeatures analyze_text(std::string_view text);

/// Deterministic and total over nonempty text. Markup hints take precedence;
/// otherwise the part-of-speech-lite features decide.
ElementType classify_element(std::string_view text, MarkupHint hint, const ClassifierConfig& config = {});

bool is_verb_lexicon_word(std::string_view lowercase_word);

}  // namespace tenk::parser
