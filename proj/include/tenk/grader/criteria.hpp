#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tenk::grader {

enum class Dimension { Confidence, Environment, Innovation, People };
enum class GraderMode { Normal, Strict };

inline constexpr std::array<Dimension, 4> kDimensions = {Dimension::Confidence, Dimension::Environment,
                                                         Dimension::Innovation, Dimension::People};
inline constexpr std::array<GraderMode, 2> kModes = {GraderMode::Normal, GraderMode::Strict};

std::string_view to_string(Dimension d) noexcept;
std::string_view to_string(GraderMode m) noexcept;
std::optional<Dimension> parse_dimension(std::string_view s);
std::optional<GraderMode> parse_mode(std::string_view s);

struct Criterion {
    Dimension dimension;
    std::string rubric_text;
    double scale_min = 0.0;
    double scale_max = 2.0;
};

/// The four shipped rubrics; each is a full "## Criterion" block.
const Criterion& criterion_for(Dimension d);

/// Substring unique to a dimension's rubric (the "2." anchor line), handy
/// for routing scripted answers by dimension.
std::string_view criterion_marker(Dimension d);

}  // namespace tenk::grader
