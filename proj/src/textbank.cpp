#include "tdha/textbank.hpp"

#include <cmath>

#include "tdha/error.hpp"

namespace tdha {

namespace {

Vector ensemble(const std::vector<Vector>& prompts, AggregateMode mode, const std::string& cls,
                const char* polarity) {
  if (prompts.empty()) {
    throw InvalidInputError("aggregate: class " + cls + " has no " + polarity + " prompts");
  }
  const std::size_t dim = prompts.front().size();
  Vector acc(dim, 0.0);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& p = prompts[i];
    if (p.size() != dim) {
      throw ShapeError("aggregate: class " + cls + " has prompts of differing dimension");
    }
    for (double x : p) {
      if (!std::isfinite(x)) {
        throw InvalidInputError("aggregate: class " + cls + " " + polarity + " prompt " +
                                std::to_string(i) + " is not finite");
      }
    }
    const double n = norm(p);
    if (n == 0.0) {
      throw DegenerateInputError("aggregate: class " + cls + " " + polarity + " prompt " +
                                 std::to_string(i) + " is a zero vector");
    }
    const double w = mode == AggregateMode::normalized ? 1.0 / n : 1.0;
    for (std::size_t j = 0; j < dim; ++j) acc[j] += w * p[j];
  }
  const double n = norm(acc);
  if (n == 0.0) {
    throw DegenerateInputError("aggregate: class " + cls + " " + polarity +
                               " prompts cancel to a zero mean");
  }
  for (double& x : acc) x /= n;
  return acc;
}

}  // namespace

const char* to_string(AggregateMode mode) noexcept {
  return mode == AggregateMode::normalized ? "normalized" : "raw";
}

TextBank aggregate(const PromptBank& bank, AggregateMode mode) {
  const std::size_t K = bank.positive.size();
  if (bank.negative.size() != K) {
    throw ShapeError("aggregate: positive and negative prompt banks differ in class count");
  }
  if (!bank.class_names.empty() && bank.class_names.size() != K) {
    throw ShapeError("aggregate: class_names length differs from prompt bank");
  }
  TextBank out;
  out.class_names = bank.class_names;
  for (std::size_t k = 0; k < K; ++k) {
    const std::string cls = bank.class_names.empty() ? std::to_string(k) : bank.class_names[k];
    out.positive.push_back(ensemble(bank.positive[k], mode, cls, "positive"));
    out.negative.push_back(ensemble(bank.negative[k], mode, cls, "negative"));
    if (out.positive.back() == out.negative.back()) {
      out.diagnostics.push_back("class " + cls + ": positive and negative text features coincide");
    }
  }
  return out;
}

std::string negate_prompt_text(std::string_view prompt_template, std::string_view class_name) {
  std::string out;
  std::size_t pos = 0;
  bool found = false;
  while (true) {
    const std::size_t hit = prompt_template.find(kClassPlaceholder, pos);
    if (hit == std::string_view::npos) break;
    found = true;
    out.append(prompt_template.substr(pos, hit - pos));
    out.append("no ");
    out.append(class_name);
    pos = hit + kClassPlaceholder.size();
  }
  if (!found) {
    throw FormatError("negate_prompt_text: template has no {class} placeholder: '" +
                      std::string(prompt_template) + "'");
  }
  out.append(prompt_template.substr(pos));
  return out;
}

}  // namespace tdha
