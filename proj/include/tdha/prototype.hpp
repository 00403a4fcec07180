#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdha/poincare.hpp"

namespace tdha {

/// N labelled support features per class for K classes.
struct SupportSet {
  std::vector<Vector> features;
  std::vector<std::size_t> labels;
  std::size_t shots = 0;
  std::size_t class_count = 0;
  /// Class label strings. They key the negative draws so that reordering
  /// classes does not change which samples are drawn. Empty means "0".."K-1".
  std::vector<std::string> class_names;
  /// Row indices in the source split, when sampled from a bundle.
  std::vector<std::size_t> source_indices;

  /// Throws InvalidInputError unless every class has exactly `shots` rows.
  void validate() const;
  std::string class_key(std::size_t k) const;
  /// Row indices of class k, in support order.
  std::vector<std::size_t> rows_of(std::size_t k) const;
};

enum class MeanMode { ambient, tangent };

const char* to_string(MeanMode mode) noexcept;
MeanMode parse_mean_mode(std::string_view text);

struct PrototypeSet {
  std::vector<BallPoint> positive;
  std::vector<BallPoint> negative;
  /// Pre-exp-map versions of the same prototypes, used by the cosine
  /// (Euclidean) image metric.
  std::vector<Vector> positive_euclidean;
  std::vector<Vector> negative_euclidean;
  std::size_t class_count = 0;
  std::vector<std::string> diagnostics;

  bool has_negative() const noexcept { return !negative.empty(); }
};

struct PrototypeOptions {
  std::uint64_t seed = 0;
  MeanMode mean_mode = MeanMode::ambient;
  bool build_negative = true;
};

/// Unit-normalises v and rescales it to norm `scale`.
/// Throws DegenerateInputError for a zero vector.
Vector preprocess_feature(std::span<const double> v, double scale = 0.5);

/// Copy of `support` with every feature passed through preprocess_feature.
SupportSet preprocess_support(SupportSet support, double scale = 0.5);

/// Per-class Euclidean mean of the support features.
std::vector<Vector> class_means(const SupportSet& support);

/// exp_map_origin of each class mean. Expects preprocessed features.
std::vector<BallPoint> build_positive(const SupportSet& support);

/// For each class k, the support row drawn from each other class (ascending
/// class order). Draws are keyed by (seed, name of k, name of the other class).
std::vector<std::vector<std::size_t>> draw_negative_rows(const SupportSet& support,
                                                         std::uint64_t seed);

/// Mean of the exp-mapped negative draws for each class.
std::vector<BallPoint> build_negative(const SupportSet& support, std::uint64_t seed,
                                      MeanMode mode = MeanMode::ambient);

/// Both prototype families plus their Euclidean counterparts. Diagnostics
/// are recorded when a class's negative prototype coincides with its
/// positive one.
PrototypeSet build_prototypes(const SupportSet& support, const PrototypeOptions& options);

}  // namespace tdha
