#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdha/poincare.hpp"
#include "tdha/prototype.hpp"
#include "tdha/textbank.hpp"

namespace tdha {

/// The four prediction streams: image-image (hyperbolic prototypes) and
/// image-text (prompt banks), each with a positive and negative polarity.
enum class Stream : std::uint8_t {
  iip_positive = 1 << 0,
  iip_negative = 1 << 1,
  itp_positive = 1 << 2,
  itp_negative = 1 << 3,
};

class ComponentSet {
 public:
  constexpr ComponentSet() = default;
  constexpr ComponentSet(std::initializer_list<Stream> streams) {
    for (Stream s : streams) bits_ |= static_cast<std::uint8_t>(s);
  }

  static constexpr ComponentSet all() {
    return {Stream::iip_positive, Stream::iip_negative, Stream::itp_positive,
            Stream::itp_negative};
  }
  /// Comma list of iip+, iip-, itp+, itp-.
  static ComponentSet parse(std::string_view text);

  constexpr bool has(Stream s) const noexcept { return bits_ & static_cast<std::uint8_t>(s); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr bool any_image() const noexcept {
    return has(Stream::iip_positive) || has(Stream::iip_negative);
  }
  constexpr bool any_text() const noexcept {
    return has(Stream::itp_positive) || has(Stream::itp_negative);
  }
  std::string to_string() const;
  std::vector<std::string> names() const;

  friend constexpr bool operator==(ComponentSet, ComponentSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Similarity used by the image-image streams.
enum class ImageMetric {
  hyperbolic,  // Poincare distance between exp-mapped points
  cosine,      // negative cosine similarity on the un-mapped vectors
};

const char* to_string(ImageMetric metric) noexcept;
ImageMetric parse_image_metric(std::string_view text);

struct FusionConfig {
  double alpha = 1.2;    // weight of the image-image branch
  double epsilon = 5.0;  // image-image temperature
  double tau = 0.01;     // text softmax temperature
  ComponentSet components = ComponentSet::all();
  ImageMetric metric = ImageMetric::hyperbolic;

  void validate() const;
};

struct PredictionVector {
  std::vector<double> scores;
  bool normalized = true;

  std::size_t size() const noexcept { return scores.size(); }
  double sum() const noexcept;
  /// Index of the largest score; ties go to the lowest index.
  std::size_t argmax() const;
  /// Scores divided by their sum. Reporting only, argmax is unchanged.
  PredictionVector renormalized() const;
};

/// Numerically stable softmax (max subtraction).
PredictionVector softmax(std::span<const double> logits);

/// softmax(-epsilon * d_H(h, P_k)).
PredictionVector predict_hyperbolic_positive(const BallPoint& h_test,
                                             std::span<const BallPoint> prototypes,
                                             double epsilon);

/// softmax(+epsilon * d_H(h, N_k)): far from a class's negative prototype
/// means more likely to be that class.
PredictionVector predict_hyperbolic_negative(const BallPoint& h_test,
                                             std::span<const BallPoint> negatives,
                                             double epsilon);

/// Cosine counterparts of the two streams above, with d = -cos.
PredictionVector predict_cosine_positive(std::span<const double> v,
                                         std::span<const Vector> prototypes, double epsilon);
PredictionVector predict_cosine_negative(std::span<const double> v,
                                         std::span<const Vector> negatives, double epsilon);

enum class Polarity { positive, negative };

/// softmax(+-cos(v, f_k) / tau).
PredictionVector predict_text(std::span<const double> v, std::span<const Vector> bank, double tau,
                              Polarity polarity);

/// Element-wise sum of the positive and negative image-image streams. A
/// missing operand makes this a passthrough.
std::optional<PredictionVector> fuse_image_image(const std::optional<PredictionVector>& positive,
                                                 const std::optional<PredictionVector>& negative);

/// Same contract as fuse_image_image for the two text streams.
std::optional<PredictionVector> fuse_image_text(const std::optional<PredictionVector>& positive,
                                                const std::optional<PredictionVector>& negative);

/// alpha * image_image + image_text. With one branch missing the other passes
/// through unchanged. Throws InvalidInputError if both are missing.
PredictionVector fuse_final(const std::optional<PredictionVector>& image_image,
                            const std::optional<PredictionVector>& image_text, double alpha);

struct Classification {
  std::size_t label = 0;
  PredictionVector scores;
};

/// Runs every enabled stream for each test feature and fuses them.
/// Text streams see the raw feature (cosine is scale free); image streams see
/// preprocess_feature(v, scale) and, for the hyperbolic metric, its exp map.
/// Items are split over `threads` workers; results match a serial run.
std::vector<Classification> classify_batch(std::span<const Vector> test_features,
                                           const PrototypeSet& prototypes, const TextBank& bank,
                                           const FusionConfig& config, double scale,
                                           unsigned threads = 1);

}  // namespace tdha
