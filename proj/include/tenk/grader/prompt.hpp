#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tenk/grader/criteria.hpp"

namespace tenk::grader {

/// Slots: {year}, {strict_phrase}, {narrative}, {criterion}. Substitution
/// is a single left-to-right pass, so slot-like text inside the narrative
/// is never expanded.
struct PromptTemplate {
    std::string base;
    std::string strict_phrase;
    /// Bumped whenever the shipped template or rubric text changes; part of
    /// every grade fingerprint.
    std::string version;

    static const PromptTemplate& standard();
};

std::string build_absolute_prompt(std::string_view narrative, const Criterion& criterion, int year, GraderMode mode,
                                  const PromptTemplate& tmpl = PromptTemplate::standard());

/// Hex sha256 of the prompt text.
std::string prompt_hash(std::string_view prompt);

/// Literal-brace template expansion used by both prompt builders.
/// Unknown slots are left as-is.
std::string expand_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string_view, std::string_view>>& slots);

}  // namespace tenk::grader
