#include "tdha/prototype.hpp"

#include <cmath>

#include "tdha/error.hpp"
#include "tdha/rng.hpp"

namespace tdha {

void SupportSet::validate() const {
  if (class_count == 0) throw InvalidInputError("support set has no classes");
  if (features.size() != labels.size()) {
    throw ShapeError("support set: feature and label counts differ");
  }
  if (!class_names.empty() && class_names.size() != class_count) {
    throw ShapeError("support set: class_names length differs from class_count");
  }
  std::vector<std::size_t> counts(class_count, 0);
  for (std::size_t label : labels) {
    if (label >= class_count) {
      throw InvalidInputError("support set: label " + std::to_string(label) + " out of range");
    }
    ++counts[label];
  }
  for (std::size_t k = 0; k < class_count; ++k) {
    if (counts[k] == 0) {
      throw InvalidInputError("support set: class " + class_key(k) + " has no samples");
    }
    if (shots != 0 && counts[k] != shots) {
      throw InvalidInputError("support set: class " + class_key(k) + " has " +
                              std::to_string(counts[k]) + " samples, expected " +
                              std::to_string(shots));
    }
  }
  const std::size_t dim = features.empty() ? 0 : features.front().size();
  for (const auto& f : features) {
    if (f.size() != dim) throw ShapeError("support set: inconsistent feature dimension");
  }
}

std::string SupportSet::class_key(std::size_t k) const {
  return class_names.empty() ? std::to_string(k) : class_names[k];
}

std::vector<std::size_t> SupportSet::rows_of(std::size_t k) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == k) rows.push_back(i);
  }
  return rows;
}

const char* to_string(MeanMode mode) noexcept {
  return mode == MeanMode::ambient ? "ambient" : "tangent";
}

MeanMode parse_mean_mode(std::string_view text) {
  if (text == "ambient") return MeanMode::ambient;
  if (text == "tangent") return MeanMode::tangent;
  throw InvalidInputError("unknown mean mode '" + std::string(text) + "'");
}

Vector preprocess_feature(std::span<const double> v, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidInputError("preprocess_feature: scale must be positive");
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInputError("preprocess_feature: non-finite entry");
  }
  const double n = norm(v);
  if (n == 0.0) throw DegenerateInputError("preprocess_feature: zero vector");
  Vector out(v.begin(), v.end());
  for (double& x : out) x = x / n * scale;
  return out;
}

SupportSet preprocess_support(SupportSet support, double scale) {
  for (auto& f : support.features) f = preprocess_feature(f, scale);
  return support;
}

std::vector<Vector> class_means(const SupportSet& support) {
  support.validate();
  const std::size_t dim = support.features.front().size();
  std::vector<Vector> means(support.class_count, Vector(dim, 0.0));
  std::vector<std::size_t> counts(support.class_count, 0);
  for (std::size_t i = 0; i < support.features.size(); ++i) {
    auto& m = means[support.labels[i]];
    for (std::size_t j = 0; j < dim; ++j) m[j] += support.features[i][j];
    ++counts[support.labels[i]];
  }
  for (std::size_t k = 0; k < means.size(); ++k) {
    const double inv = 1.0 / static_cast<double>(counts[k]);
    for (double& x : means[k]) x *= inv;
  }
  return means;
}

std::vector<BallPoint> build_positive(const SupportSet& support) {
  std::vector<BallPoint> out;
  for (const auto& m : class_means(support)) out.push_back(exp_map_origin(m));
  return out;
}

std::vector<std::vector<std::size_t>> draw_negative_rows(const SupportSet& support,
                                                         std::uint64_t seed) {
  support.validate();
  const std::size_t K = support.class_count;
  if (K < 2) throw InvalidInputError("negative prototypes need at least two classes");

  std::vector<std::vector<std::size_t>> rows_by_class(K);
  std::vector<std::uint64_t> key_hash(K);
  for (std::size_t k = 0; k < K; ++k) {
    rows_by_class[k] = support.rows_of(k);
    key_hash[k] = fnv1a64(support.class_key(k));
  }

  std::vector<std::vector<std::size_t>> drawn(K);
  for (std::size_t k = 0; k < K; ++k) {
    drawn[k].reserve(K - 1);
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      KeyedRng rng(mix_keys({seed, key_hash[k], key_hash[j]}));
      const auto& pool = rows_by_class[j];
      drawn[k].push_back(pool[rng.below(pool.size())]);
    }
  }
  return drawn;
}

namespace {

BallPoint mean_of_mapped(const SupportSet& support, const std::vector<std::size_t>& rows,
                         MeanMode mode) {
  std::vector<BallPoint> mapped;
  mapped.reserve(rows.size());
  for (std::size_t r : rows) mapped.push_back(exp_map_origin(support.features[r]));
  return mode == MeanMode::ambient ? ambient_mean(mapped) : tangent_mean(mapped);
}

Vector euclidean_mean(const SupportSet& support, const std::vector<std::size_t>& rows) {
  Vector m(support.features[rows.front()].size(), 0.0);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += support.features[r][j];
  }
  for (double& x : m) x /= static_cast<double>(rows.size());
  return m;
}

}  // namespace

std::vector<BallPoint> build_negative(const SupportSet& support, std::uint64_t seed,
                                      MeanMode mode) {
  std::vector<BallPoint> out;
  for (const auto& rows : draw_negative_rows(support, seed)) {
    out.push_back(mean_of_mapped(support, rows, mode));
  }
  return out;
}

PrototypeSet build_prototypes(const SupportSet& support, const PrototypeOptions& options) {
  PrototypeSet set;
  set.class_count = support.class_count;
  set.positive_euclidean = class_means(support);
  for (const auto& m : set.positive_euclidean) set.positive.push_back(exp_map_origin(m));

  if (!options.build_negative) return set;

  const auto drawn = draw_negative_rows(support, options.seed);
  for (std::size_t k = 0; k < drawn.size(); ++k) {
    set.negative.push_back(mean_of_mapped(support, drawn[k], options.mean_mode));
    set.negative_euclidean.push_back(euclidean_mean(support, drawn[k]));
    if (set.negative.back() == set.positive[k]) {
      set.diagnostics.push_back("class " + support.class_key(k) +
                                ": negative prototype coincides with positive prototype");
    }
  }
  return set;
}

}  // namespace tdha
