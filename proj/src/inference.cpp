#include "tdha/inference.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "tdha/error.hpp"

namespace tdha {

namespace {

struct StreamName {
  Stream stream;
  std::string_view name;
};

constexpr StreamName kStreamNames[] = {
    {Stream::iip_positive, "iip+"},
    {Stream::iip_negative, "iip-"},
    {Stream::itp_positive, "itp+"},
    {Stream::itp_negative, "itp-"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw DegenerateInputError("cosine similarity of a zero vector");
  return dot(a, b) / (na * nb);
}

void require_size(const PredictionVector& p, std::size_t k) {
  if (p.size() != k) throw ShapeError("prediction vectors differ in length");
}

std::optional<PredictionVector> sum_pair(const std::optional<PredictionVector>& a,
                                         const std::optional<PredictionVector>& b) {
  if (!a) return b;
  if (!b) return a;
  require_size(*b, a->size());
  PredictionVector out{a->scores, false};
  for (std::size_t k = 0; k < out.scores.size(); ++k) out.scores[k] += b->scores[k];
  return out;
}

}  // namespace

ComponentSet ComponentSet::parse(std::string_view text) {
  ComponentSet set;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view token = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (token.empty()) continue;
    const auto it = std::find_if(std::begin(kStreamNames), std::end(kStreamNames),
                                 [&](const StreamName& s) { return s.name == token; });
    if (it == std::end(kStreamNames)) {
      throw InvalidInputError("unknown component '" + std::string(token) +
                              "' (expected iip+, iip-, itp+, itp-)");
    }
    set.bits_ |= static_cast<std::uint8_t>(it->stream);
  }
  if (set.empty()) throw InvalidInputError("component list is empty");
  return set;
}

std::vector<std::string> ComponentSet::names() const {
  std::vector<std::string> out;
  for (const auto& s : kStreamNames) {
    if (has(s.stream)) out.emplace_back(s.name);
  }
  return out;
}

std::string ComponentSet::to_string() const {
  std::string out;
  for (const auto& n : names()) {
    if (!out.empty()) out += ',';
    out += n;
  }
  return out;
}

const char* to_string(ImageMetric metric) noexcept {
  return metric == ImageMetric::hyperbolic ? "hd" : "ecs";
}

ImageMetric parse_image_metric(std::string_view text) {
  if (text == "hd") return ImageMetric::hyperbolic;
  if (text == "ecs") return ImageMetric::cosine;
  throw InvalidInputError("unknown metric '" + std::string(text) + "' (expected hd or ecs)");
}

void FusionConfig::validate() const {
  if (components.empty()) throw InvalidInputError("at least one component must be enabled");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidInputError("alpha must be finite and non-negative");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInputError("epsilon must be finite and positive");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidInputError("tau must be finite and positive");
  }
}

double PredictionVector::sum() const noexcept {
  double s = 0.0;
  for (double x : scores) s += x;
  return s;
}

std::size_t PredictionVector::argmax() const {
  if (scores.empty()) throw InvalidInputError("argmax of an empty prediction");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

PredictionVector PredictionVector::renormalized() const {
  PredictionVector out{scores, true};
  const double s = sum();
  for (double& x : out.scores) x /= s;
  return out;
}

PredictionVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw InvalidInputError("softmax of an empty vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  PredictionVector out{std::vector<double>(logits.size()), true};
  double s = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.scores[k] = std::exp(logits[k] - m);
    s += out.scores[k];
  }
  for (double& x : out.scores) x /= s;
  return out;
}

PredictionVector predict_hyperbolic_positive(const BallPoint& h_test,
                                             std::span<const BallPoint> prototypes,
                                             double epsilon) {
  std::vector<double> logits(prototypes.size());
  for (std::size_t k = 0; k < prototypes.size(); ++k) {
    logits[k] = -epsilon * distance(h_test, prototypes[k]);
  }
  return softmax(logits);
}

PredictionVector predict_hyperbolic_negative(const BallPoint& h_test,
                                             std::span<const BallPoint> negatives,
                                             double epsilon) {
  std::vector<double> logits(negatives.size());
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    logits[k] = epsilon * distance(h_test, negatives[k]);
  }
  return softmax(logits);
}

PredictionVector predict_cosine_positive(std::span<const double> v,
                                         std::span<const Vector> prototypes, double epsilon) {
  std::vector<double> logits(prototypes.size());
  for (std::size_t k = 0; k < prototypes.size(); ++k) {
    logits[k] = epsilon * cosine(v, prototypes[k]);
  }
  return softmax(logits);
}

PredictionVector predict_cosine_negative(std::span<const double> v,
                                         std::span<const Vector> negatives, double epsilon) {
  std::vector<double> logits(negatives.size());
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    logits[k] = -epsilon * cosine(v, negatives[k]);
  }
  return softmax(logits);
}

PredictionVector predict_text(std::span<const double> v, std::span<const Vector> bank, double tau,
                              Polarity polarity) {
  if (norm(v) == 0.0) throw DegenerateInputError("predict_text: zero test feature");
  const double sign = polarity == Polarity::positive ? 1.0 : -1.0;
  std::vector<double> logits(bank.size());
  for (std::size_t k = 0; k < bank.size(); ++k) {
    logits[k] = sign * cosine(v, bank[k]) / tau;
  }
  return softmax(logits);
}

std::optional<PredictionVector> fuse_image_image(const std::optional<PredictionVector>& positive,
                                                 const std::optional<PredictionVector>& negative) {
  return sum_pair(positive, negative);
}

std::optional<PredictionVector> fuse_image_text(const std::optional<PredictionVector>& positive,
                                                const std::optional<PredictionVector>& negative) {
  return sum_pair(positive, negative);
}

PredictionVector fuse_final(const std::optional<PredictionVector>& image_image,
                            const std::optional<PredictionVector>& image_text, double alpha) {
  if (!image_image && !image_text) throw InvalidInputError("fuse_final: no branch enabled");
  if (!image_image) return *image_text;
  if (!image_text) return *image_image;
  require_size(*image_text, image_image->size());
  PredictionVector out{image_text->scores, false};
  for (std::size_t k = 0; k < out.scores.size(); ++k) {
    out.scores[k] = alpha * image_image->scores[k] + image_text->scores[k];
  }
  return out;
}

namespace {

void check_inputs(const PrototypeSet& prototypes, const TextBank& bank,
                  const FusionConfig& config, std::size_t dim) {
  const auto& c = config.components;
  std::size_t K = 0;
  auto expect = [&](std::size_t n, const char* what) {
    if (K == 0) K = n;
    if (n != K || n == 0) {
      throw ShapeError(std::string("classify_batch: ") + what + " has " + std::to_string(n) +
                       " classes, expected " + std::to_string(K));
    }
  };
  auto expect_dim = [&](std::size_t d, const char* what) {
    if (d != dim) {
      throw ShapeError(std::string("classify_batch: ") + what + " has dimension " +
                       std::to_string(d) + ", test features have " + std::to_string(dim));
    }
  };
  if (c.has(Stream::iip_positive)) {
    expect(prototypes.positive.size(), "positive prototype set");
    expect_dim(prototypes.positive.front().dim(), "positive prototypes");
  }
  if (c.has(Stream::iip_negative)) {
    expect(prototypes.negative.size(), "negative prototype set");
    expect_dim(prototypes.negative.front().dim(), "negative prototypes");
  }
  if (c.has(Stream::itp_positive)) {
    expect(bank.positive.size(), "positive text bank");
    expect_dim(bank.positive.front().size(), "positive text bank");
  }
  if (c.has(Stream::itp_negative)) {
    expect(bank.negative.size(), "negative text bank");
    expect_dim(bank.negative.front().size(), "negative text bank");
  }
}

Classification classify_one(std::span<const double> v, const PrototypeSet& prototypes,
                            const TextBank& bank, const FusionConfig& config, double scale) {
  const auto& c = config.components;
  std::optional<PredictionVector> iip_pos, iip_neg, itp_pos, itp_neg;

  if (c.any_image()) {
    const Vector pre = preprocess_feature(v, scale);
    if (config.metric == ImageMetric::hyperbolic) {
      const BallPoint h = exp_map_origin(pre);
      if (c.has(Stream::iip_positive)) {
        iip_pos = predict_hyperbolic_positive(h, prototypes.positive, config.epsilon);
      }
      if (c.has(Stream::iip_negative)) {
        iip_neg = predict_hyperbolic_negative(h, prototypes.negative, config.epsilon);
      }
    } else {
      if (c.has(Stream::iip_positive)) {
        iip_pos = predict_cosine_positive(pre, prototypes.positive_euclidean, config.epsilon);
      }
      if (c.has(Stream::iip_negative)) {
        iip_neg = predict_cosine_negative(pre, prototypes.negative_euclidean, config.epsilon);
      }
    }
  }
  if (c.has(Stream::itp_positive)) {
    itp_pos = predict_text(v, bank.positive, config.tau, Polarity::positive);
  }
  if (c.has(Stream::itp_negative)) {
    itp_neg = predict_text(v, bank.negative, config.tau, Polarity::negative);
  }

  PredictionVector fused = fuse_final(fuse_image_image(iip_pos, iip_neg),
                                      fuse_image_text(itp_pos, itp_neg), config.alpha);
  const std::size_t label = fused.argmax();
  return {label, std::move(fused)};
}

}  // namespace

std::vector<Classification> classify_batch(std::span<const Vector> test_features,
                                           const PrototypeSet& prototypes, const TextBank& bank,
                                           const FusionConfig& config, double scale,
                                           unsigned threads) {
  config.validate();
  if (test_features.empty()) return {};
  const std::size_t dim = test_features.front().size();
  for (const auto& v : test_features) {
    if (v.size() != dim) throw ShapeError("classify_batch: test features differ in dimension");
  }
  check_inputs(prototypes, bank, config, dim);

  std::vector<Classification> out(test_features.size());
  const std::size_t n = test_features.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = classify_one(test_features[i], prototypes, bank, config, scale);
    }
    return out;
  }

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          const std::size_t end = std::min(n, (w + 1) * chunk);
          for (std::size_t i = w * chunk; i < end; ++i) {
            out[i] = classify_one(test_features[i], prototypes, bank, config, scale);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace tdha
