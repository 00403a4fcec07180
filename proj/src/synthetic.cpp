#include <cmath>
#include <limits>
#include <sstream>

#include "tdha/data.hpp"
#include "tdha/error.hpp"
#include "tdha/rng.hpp"

namespace tdha {

namespace {

// Independent keyed streams so that, e.g., changing noise_sigma never moves
// the class means.
enum StreamTag : std::uint64_t {
  kSuperStream = 1,
  kBranchStream = 2,
  kTrainStream = 3,
  kTestStream = 4,
  kTextStream = 5,
};

// Isotropic Gaussian with expected squared norm magnitude^2, so magnitudes
// are relative to the unit-norm class means whatever the dimension.
Vector gaussian(KeyedRng& rng, std::size_t dim, double magnitude) {
  const double sigma = magnitude / std::sqrt(static_cast<double>(dim));
  Vector v(dim);
  for (double& x : v) x = sigma * rng.normal();
  return v;
}

void normalize_in_place(Vector& v) {
  const double n = norm(v);
  if (n == 0.0) throw DegenerateInputError("synthetic sample collapsed to the zero vector");
  for (double& x : v) x /= n;
}

Vector unit_gaussian(KeyedRng& rng, std::size_t dim) {
  Vector v = gaussian(rng, dim, 1.0);
  normalize_in_place(v);
  return v;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check(const SyntheticSpec& s) {
  if (s.dim < 2) throw InvalidInputError("generate_synthetic: dim must be >= 2");
  if (s.classes_per_super == 0 || s.super_count == 0 || s.train_per_class == 0 ||
      s.test_per_class == 0) {
    throw InvalidInputError("generate_synthetic: all counts must be >= 1");
  }
  if (!(s.noise_sigma >= 0.0) || !(s.modality_gap >= 0.0)) {
    throw InvalidInputError("generate_synthetic: noise_sigma and modality_gap must be >= 0");
  }
  if (!(s.branch_spread >= 0.0 && s.branch_spread < 1.0)) {
    throw InvalidInputError("generate_synthetic: branch_spread must lie in [0, 1)");
  }
}

}  // namespace

std::vector<Vector> synthetic_class_means(const SyntheticSpec& spec) {
  check(spec);
  KeyedRng super_rng(mix_keys({spec.seed, kSuperStream}));
  std::vector<Vector> supers;
  for (std::size_t s = 0; s < spec.super_count; ++s) supers.push_back(unit_gaussian(super_rng, spec.dim));

  // closest pair of superclass directions bounds the sibling offset
  double separation = std::sqrt(2.0);
  if (supers.size() > 1) {
    separation = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < supers.size(); ++a) {
      for (std::size_t b = a + 1; b < supers.size(); ++b) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < spec.dim; ++i) {
          const double d = supers[a][i] - supers[b][i];
          d2 += d * d;
        }
        separation = std::min(separation, std::sqrt(d2));
      }
    }
  }
  const double offset = spec.branch_spread * separation;

  KeyedRng branch_rng(mix_keys({spec.seed, kBranchStream}));
  std::vector<Vector> means;
  for (std::size_t s = 0; s < spec.super_count; ++s) {
    for (std::size_t c = 0; c < spec.classes_per_super; ++c) {
      const Vector dir = unit_gaussian(branch_rng, spec.dim);
      Vector m = supers[s];
      for (std::size_t i = 0; i < spec.dim; ++i) m[i] += offset * dir[i];
      normalize_in_place(m);
      means.push_back(std::move(m));
    }
  }
  return means;
}

EmbeddingBundle generate_synthetic(const SyntheticSpec& spec) {
  const std::vector<Vector> means = synthetic_class_means(spec);
  const std::size_t K = means.size();

  EmbeddingBundle b;
  b.dim = spec.dim;
  for (std::size_t s = 0; s < spec.super_count; ++s) {
    for (std::size_t c = 0; c < spec.classes_per_super; ++c) {
      b.class_names.push_back("super" + std::to_string(s) + "/class" + std::to_string(c));
    }
  }

  auto scatter = [&](LabeledMatrix& out, std::size_t per_class, StreamTag tag) {
    KeyedRng rng(mix_keys({spec.seed, tag}));
    std::vector<Vector> rows;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < per_class; ++i) {
        Vector v = gaussian(rng, spec.dim, spec.noise_sigma);
        for (std::size_t j = 0; j < spec.dim; ++j) v[j] += means[k][j];
        normalize_in_place(v);
        rows.push_back(std::move(v));
        out.labels.push_back(static_cast<std::uint32_t>(k));
      }
    }
    out.features = FloatMatrix::from_rows(rows, spec.dim);
  };
  scatter(b.train, spec.train_per_class, kTrainStream);
  scatter(b.test, spec.test_per_class, kTestStream);

  KeyedRng text_rng(mix_keys({spec.seed, kTextStream}));
  std::vector<Vector> text_pos;
  for (std::size_t k = 0; k < K; ++k) {
    Vector t = gaussian(text_rng, spec.dim, spec.modality_gap);
    for (std::size_t j = 0; j < spec.dim; ++j) t[j] += means[k][j];
    normalize_in_place(t);
    text_pos.push_back(std::move(t));
  }
  std::vector<Vector> text_neg;
  for (std::size_t k = 0; k < K; ++k) {
    Vector acc(spec.dim, 0.0);
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      for (std::size_t i = 0; i < spec.dim; ++i) acc[i] += text_pos[j][i];
    }
    if (K == 1) acc = text_pos[0];
    normalize_in_place(acc);
    text_neg.push_back(std::move(acc));
  }
  b.text_positive.features = FloatMatrix::from_rows(text_pos, spec.dim);
  b.text_negative.features = FloatMatrix::from_rows(text_neg, spec.dim);
  for (std::uint32_t k = 0; k < K; ++k) {
    b.text_positive.labels.push_back(k);
    b.text_negative.labels.push_back(k);
  }

  b.metadata = {
      {"source", "synthetic"},
      {"domain", "synthetic-hierarchy"},
      {"prompt_count", "1"},
      {"synthetic.super_count", std::to_string(spec.super_count)},
      {"synthetic.classes_per_super", std::to_string(spec.classes_per_super)},
      {"synthetic.dim", std::to_string(spec.dim)},
      {"synthetic.noise_sigma", format_double(spec.noise_sigma)},
      {"synthetic.modality_gap", format_double(spec.modality_gap)},
      {"synthetic.branch_spread", format_double(spec.branch_spread)},
      {"synthetic.train_per_class", std::to_string(spec.train_per_class)},
      {"synthetic.test_per_class", std::to_string(spec.test_per_class)},
      {"synthetic.seed", std::to_string(spec.seed)},
  };
  return b;
}

}  // namespace tdha
