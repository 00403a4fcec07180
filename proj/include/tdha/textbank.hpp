#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tdha/poincare.hpp"

namespace tdha {

/// Raw prompt features per class, positive and negated.
struct PromptBank {
  std::vector<std::string> class_names;
  std::vector<std::vector<Vector>> positive;
  std::vector<std::vector<Vector>> negative;
};

/// Unit-norm per-class text features.
struct TextBank {
  std::vector<std::string> class_names;
  std::vector<Vector> positive;
  std::vector<Vector> negative;
  std::vector<std::string> diagnostics;

  std::size_t class_count() const noexcept { return positive.size(); }
};

enum class AggregateMode {
  normalized,  // normalise each prompt, average, renormalise
  raw,         // average raw features, then normalise
};

const char* to_string(AggregateMode mode) noexcept;

/// Ensembles each class's prompts into one unit vector per polarity.
/// Throws DegenerateInputError naming the class and prompt index for a zero
/// prompt feature.
TextBank aggregate(const PromptBank& bank, AggregateMode mode = AggregateMode::normalized);

inline constexpr std::string_view kClassPlaceholder = "{class}";

/// "a photo of {class}" -> "a photo of no <class_name>". Every placeholder is
/// replaced. Throws FormatError when the template has none.
std::string negate_prompt_text(std::string_view prompt_template, std::string_view class_name);

}  // namespace tdha
