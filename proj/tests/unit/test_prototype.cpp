#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "tdha/error.hpp"
#include "tdha/prototype.hpp"
#include "tdha/rng.hpp"

using namespace tdha;

namespace {

constexpr double kTanh03 = 0.29131261245159091;  // mpmath

SupportSet make_support(std::vector<Vector> features, std::vector<std::size_t> labels,
                        std::size_t shots, std::size_t classes,
                        std::vector<std::string> names = {}) {
  SupportSet s;
  s.features = std::move(features);
  s.labels = std::move(labels);
  s.shots = shots;
  s.class_count = classes;
  s.class_names = std::move(names);
  return s;
}

SupportSet random_support(KeyedRng& rng, std::size_t K, std::size_t N, std::size_t dim,
                          double scale) {
  SupportSet s;
  s.shots = N;
  s.class_count = K;
  for (std::size_t k = 0; k < K; ++k) {
    s.class_names.push_back("class-" + std::to_string(k));
    for (std::size_t i = 0; i < N; ++i) {
      Vector v(dim);
      for (double& x : v) x = rng.normal();
      v[k % dim] += 3.0;
      s.features.push_back(preprocess_feature(v, scale));
      s.labels.push_back(k);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("preprocess_feature") {
  const Vector a{3.0, 4.0};
  auto out = preprocess_feature(a, 0.5);
  CHECK(out[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.4).epsilon(1e-15));
  const Vector b{0.5, 0.0};
  CHECK(preprocess_feature(b, 1.0) == Vector{1.0, 0.0});
  CHECK_THROWS_AS(preprocess_feature(Vector{0.0, 0.0}, 0.5), DegenerateInputError);
  CHECK_THROWS_AS(preprocess_feature(a, 0.0), InvalidInputError);
}

TEST_CASE("build_positive averages then maps") {
  auto s = make_support({{0.2, 0.0}, {0.4, 0.0}}, {0, 0}, 2, 1);
  auto p = build_positive(s);
  REQUIRE(p.size() == 1);
  CHECK(p[0].coords()[0] == doctest::Approx(kTanh03).epsilon(1e-14));
  CHECK(p[0].coords()[1] == 0.0);

  s = make_support({{0.1, 0.2}}, {0}, 1, 1);
  CHECK(build_positive(s)[0] == exp_map_origin(Vector{0.1, 0.2}));

  s = make_support({{0.1, -0.2}, {0.1, -0.2}, {0.1, -0.2}}, {0, 0, 0}, 3, 1);
  const auto q = build_positive(s)[0];
  const auto r = exp_map_origin(Vector{0.1, -0.2});
  CHECK(distance(q, r) < 1e-15);
}

TEST_CASE("support validation") {
  auto s = make_support({{0.1, 0.0}, {0.2, 0.0}}, {0, 0}, 2, 2);
  CHECK_THROWS_AS(build_positive(s), InvalidInputError);  // class 1 empty
  s = make_support({{0.1, 0.0}, {0.2, 0.0}, {0.3, 0.0}}, {0, 0, 1}, 2, 2);
  CHECK_THROWS_AS(s.validate(), InvalidInputError);  // unequal shots
  s = make_support({{0.1, 0.0}, {0.2, 0.0}}, {0, 5}, 1, 2);
  CHECK_THROWS_AS(s.validate(), InvalidInputError);
}

TEST_CASE("build_negative: cat/dog/bird worked example") {
  const Vector cat{0.1, 0.3}, dog{0.4, -0.1}, bird{-0.2, 0.2};
  const auto s = make_support({cat, dog, bird}, {0, 1, 2}, 1, 3, {"cat", "dog", "bird"});
  const auto neg = build_negative(s, 123, MeanMode::ambient);
  const std::vector<BallPoint> dog_bird{exp_map_origin(dog), exp_map_origin(bird)};
  CHECK(neg[0] == ambient_mean(dog_bird));
  const std::vector<BallPoint> cat_bird{exp_map_origin(cat), exp_map_origin(bird)};
  CHECK(neg[1] == ambient_mean(cat_bird));

  const auto neg_t = build_negative(s, 123, MeanMode::tangent);
  CHECK(neg_t[0] == tangent_mean(dog_bird));
}

TEST_CASE("build_negative with two classes uses the single drawn other-class sample") {
  const auto s = make_support({{0.1, 0.0}, {0.2, 0.1}, {-0.3, 0.1}, {-0.1, -0.2}}, {0, 0, 1, 1},
                              2, 2);
  const auto rows = draw_negative_rows(s, 99);
  REQUIRE(rows[0].size() == 1);
  CHECK(s.labels[rows[0][0]] == 1);
  CHECK(s.labels[rows[1][0]] == 0);
  const auto neg = build_negative(s, 99);
  CHECK(neg[0] == exp_map_origin(s.features[rows[0][0]]));
}

TEST_CASE("build_negative needs two classes") {
  const auto s = make_support({{0.1, 0.0}}, {0}, 1, 1);
  CHECK_THROWS_AS(build_negative(s, 1), InvalidInputError);
}

TEST_CASE("prototype construction is deterministic and seed-sensitive") {
  KeyedRng rng(5);
  const auto s = random_support(rng, 6, 8, 5, 0.5);
  const auto a = build_prototypes(s, {77, MeanMode::ambient, true});
  const auto b = build_prototypes(s, {77, MeanMode::ambient, true});
  CHECK(a.positive == b.positive);
  CHECK(a.negative == b.negative);
  CHECK(a.negative_euclidean == b.negative_euclidean);

  bool any_diff = false;
  for (std::uint64_t seed = 78; seed < 90 && !any_diff; ++seed) {
    any_diff = build_prototypes(s, {seed, MeanMode::ambient, true}).negative != a.negative;
  }
  CHECK(any_diff);
}

TEST_CASE("class permutation permutes prototypes (draws keyed by class name)") {
  KeyedRng rng(11);
  const auto s = random_support(rng, 5, 4, 6, 0.5);
  const auto base = build_prototypes(s, {2024, MeanMode::ambient, true});

  // reverse class positions, keep names attached to their samples
  const std::size_t K = s.class_count;
  SupportSet p;
  p.shots = s.shots;
  p.class_count = K;
  p.class_names.resize(K);
  for (std::size_t k = 0; k < K; ++k) p.class_names[K - 1 - k] = s.class_names[k];
  for (std::size_t k = K; k-- > 0;) {
    for (std::size_t r : s.rows_of(k)) {
      p.features.push_back(s.features[r]);
      p.labels.push_back(K - 1 - k);
    }
  }
  const auto perm = build_prototypes(p, {2024, MeanMode::ambient, true});
  for (std::size_t k = 0; k < K; ++k) {
    CHECK(perm.positive[K - 1 - k] == base.positive[k]);
    // the other-class order is reversed too, so the mean may differ by rounding
    CHECK(distance(perm.negative[K - 1 - k], base.negative[k]) < 1e-14);
  }
}

TEST_CASE("positive prototypes stay within tanh(scale)") {
  KeyedRng rng(3);
  for (double scale : {0.1, 0.5, 1.0, 2.0}) {
    const auto s = random_support(rng, 4, 8, 7, scale);
    for (const auto& p : build_positive(s)) CHECK(p.norm() <= std::tanh(scale) + 1e-12);
  }
}

TEST_CASE("well separated classes give distinct positive and negative prototypes") {
  KeyedRng rng(9);
  const auto s = random_support(rng, 4, 4, 8, 0.5);
  const auto set = build_prototypes(s, {1, MeanMode::ambient, true});
  for (std::size_t k = 0; k < set.class_count; ++k) {
    CHECK(distance(set.positive[k], set.negative[k]) > 0.0);
  }
  CHECK(set.diagnostics.empty());
}

TEST_CASE("coinciding positive and negative prototypes raise a diagnostic") {
  // every sample identical: negatives equal positives
  const Vector f{0.2, 0.1};
  const auto s = make_support({f, f}, {0, 1}, 1, 2);
  const auto set = build_prototypes(s, {1, MeanMode::ambient, true});
  CHECK(set.diagnostics.size() == 2);
}

TEST_CASE("batch negative build matches a per-class rebuild") {
  KeyedRng rng(21);
  const auto s = random_support(rng, 4, 2, 3, 0.5);
  const auto batch = build_negative(s, 5, MeanMode::tangent);
  const auto rows = draw_negative_rows(s, 5);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::vector<BallPoint> pts;
    for (auto r : rows[k]) pts.push_back(exp_map_origin(s.features[r]));
    CHECK(tangent_mean(pts) == batch[k]);
  }
}
