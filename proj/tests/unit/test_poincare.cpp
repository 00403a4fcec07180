#include <cmath>
#include <vector>

#include "doctest.h"
#include "tdha/error.hpp"
#include "tdha/geometry_check.hpp"
#include "tdha/poincare.hpp"
#include "tdha/rng.hpp"

using namespace tdha;

namespace {

// Reference values from tests/oracles/compute_oracles.py (mpmath, 50 digits).
constexpr double kTanhHalf = 0.46211715726000976;
constexpr double kExp34X = 0.59994552255755708;
constexpr double kExp34Y = 0.7999273634100761;
constexpr double kDistOriginHalf = 1.0986122886681097;
constexpr double kDistAcrossOrigin = 2.1972245773362194;
constexpr double kFrechetDiag = 0.024968750048827972;

BallPoint P(std::initializer_list<double> c) { return BallPoint::from_coords(std::vector<double>(c)); }

}  // namespace

TEST_CASE("exp_map_origin matches high-precision values") {
  const std::vector<double> w{0.5, 0.0};
  auto h = exp_map_origin(w);
  CHECK(h.coords()[0] == doctest::Approx(kTanhHalf).epsilon(1e-15));
  CHECK(h.coords()[1] == 0.0);

  const std::vector<double> w34{3.0, 4.0};
  h = exp_map_origin(w34);
  CHECK(h.coords()[0] == doctest::Approx(kExp34X).epsilon(1e-14));
  CHECK(h.coords()[1] == doctest::Approx(kExp34Y).epsilon(1e-14));

  const std::vector<double> zero{0.0, 0.0};
  CHECK(exp_map_origin(zero) == BallPoint::origin(2));
}

TEST_CASE("exp_map_origin clamps saturated inputs inside the ball") {
  const std::vector<double> big{400.0, -300.0};
  const auto h = exp_map_origin(big);
  CHECK(h.norm() <= kMaxBallNorm);
  CHECK(h.norm() > kMaxBallNorm - 1e-12);
  const std::vector<double> nan{std::nan(""), 0.0};
  CHECK_THROWS_AS(exp_map_origin(nan), InvalidInputError);
}

TEST_CASE("log_map_origin inverts exp_map_origin") {
  auto v = log_map_origin(P({kTanhHalf, 0.0}));
  CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v[1] == 0.0);
  CHECK(log_map_origin(BallPoint::origin(2)) == std::vector<double>{0.0, 0.0});

  const std::vector<double> w{0.3, -0.7};
  v = log_map_origin(exp_map_origin(w));
  CHECK(v[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(-0.7).epsilon(1e-14));
}

TEST_CASE("BallPoint rejects points on or outside the sphere") {
  CHECK_THROWS_AS(P({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(P({0.8, 0.8}), DomainError);
  CHECK_THROWS_AS(P({std::nan(""), 0.0}), InvalidInputError);
  const auto p = P({1.0 - 1e-9, 0.0});
  CHECK(p.norm() <= kMaxBallNorm);
}

TEST_CASE("distance examples") {
  CHECK(distance(BallPoint::origin(2), P({0.5, 0.0})) ==
        doctest::Approx(kDistOriginHalf).epsilon(1e-14));
  CHECK(distance(P({0.5, 0.0}), P({-0.5, 0.0})) ==
        doctest::Approx(kDistAcrossOrigin).epsilon(1e-14));
  CHECK(distance(P({0.3, 0.4}), P({0.3, 0.4})) == 0.0);
  CHECK_THROWS_AS(distance(P({0.1, 0.2}), P({0.1, 0.2, 0.0})), ShapeError);
}

TEST_CASE("arcosh1p is accurate across the series switch") {
  for (double x : {1e-14, 1e-10, 9.99e-9, 1.01e-8, 1e-6, 1e-4, 1.0, 1e6}) {
    // std::acosh(1 + x) loses the low bits of x, so small x uses the series
    const double ref = x < 1e-4 ? std::sqrt(2.0 * x) * (1.0 - x / 12.0 + 3.0 * x * x / 160.0)
                                : std::acosh(1.0 + x);
    CHECK(arcosh1p(x) == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK(arcosh1p(0.0) == 0.0);
}

TEST_CASE("conformal_factor") {
  CHECK(conformal_factor(BallPoint::origin(2)) == 1.0);
  const std::vector<double> half{0.5, 0.0};
  CHECK(conformal_factor(half) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  const std::vector<double> edge{std::sqrt(1.0 - 1e-6), 0.0};
  CHECK(conformal_factor(edge) > 1e6 * (1.0 - 1e-9));
  const std::vector<double> out{1.0, 0.0};
  CHECK_THROWS_AS(conformal_factor(out), DomainError);
}

TEST_CASE("ambient_mean") {
  std::vector<BallPoint> pts{P({0.2, 0.0}), P({-0.2, 0.0})};
  CHECK(ambient_mean(pts) == BallPoint::origin(2));
  pts = {P({0.4, 0.0}), P({0.0, 0.4})};
  const auto m = ambient_mean(pts);
  CHECK(m.coords()[0] == doctest::Approx(0.2));
  CHECK(m.coords()[1] == doctest::Approx(0.2));
  pts = {P({0.1, -0.3})};
  CHECK(ambient_mean(pts) == pts.front());
  CHECK_THROWS_AS(ambient_mean(std::vector<BallPoint>{}), InvalidInputError);
}

TEST_CASE("tangent_mean") {
  std::vector<BallPoint> pts{P({0.2, 0.0}), P({-0.2, 0.0})};
  CHECK(tangent_mean(pts).norm() < 1e-15);
  pts = {P({0.1, -0.3})};
  const auto single = tangent_mean(pts);
  CHECK(single.coords()[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(single.coords()[1] == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK_THROWS_AS(tangent_mean(std::vector<BallPoint>{}), InvalidInputError);

  pts = {P({0.05, 0.0}), P({0.0, 0.05})};
  CHECK(distance(tangent_mean(pts), frechet_mean_oracle(pts)) <= 1e-3);
}

TEST_CASE("frechet_mean_oracle matches the mpmath minimiser") {
  std::vector<BallPoint> pts{P({0.05, 0.0}), P({0.0, 0.05})};
  const auto m = frechet_mean_oracle(pts);
  CHECK(m.coords()[0] == doctest::Approx(kFrechetDiag).epsilon(1e-9));
  CHECK(m.coords()[1] == doctest::Approx(kFrechetDiag).epsilon(1e-9));

  for (double r : {0.1, 0.5, 0.9, 0.999}) {
    pts = {P({r, 0.0}), P({-r, 0.0})};
    CHECK(frechet_mean_oracle(pts).norm() < 1e-12);
  }
  pts = {P({0.3, 0.2})};
  CHECK(distance(frechet_mean_oracle(pts), pts.front()) < 1e-12);
  CHECK_THROWS_AS(frechet_mean_oracle(std::vector<BallPoint>{}), InvalidInputError);
}

TEST_CASE("frechet_mean_oracle is a stationary point of the squared-distance sum") {
  // Independent check: central finite differences of sum d(z, x_i)^2 vanish.
  KeyedRng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<BallPoint> pts;
    for (int i = 0; i < 5; ++i) {
      std::vector<double> c(3);
      for (double& x : c) x = 0.5 * (2.0 * rng.uniform() - 1.0);
      pts.push_back(BallPoint::from_coords(c));
    }
    const auto z = frechet_mean_oracle(pts);
    auto objective = [&](std::vector<double> c) {
      const auto q = BallPoint::from_coords(c);
      double s = 0.0;
      for (const auto& p : pts) s += distance(q, p) * distance(q, p);
      return s;
    };
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> plus(z.coords().begin(), z.coords().end());
      std::vector<double> minus = plus;
      plus[j] += 1e-6;
      minus[j] -= 1e-6;
      CHECK(std::abs((objective(plus) - objective(minus)) / 2e-6) < 1e-6);
    }
  }
}

TEST_CASE("frechet_mean_oracle reports non-convergence") {
  std::vector<BallPoint> pts{P({0.6, 0.0}), P({0.0, 0.6}), P({-0.3, -0.3})};
  CHECK_THROWS_AS(frechet_mean_oracle(pts, {1e-30, 2}), ConvergenceError);
}

TEST_CASE("round trip and radial closed form on random inputs") {
  KeyedRng rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::size_t dim = 1 + rng.below(16);
    std::vector<double> w(dim);
    for (double& x : w) x = rng.normal();
    const double target = 5.0 * rng.uniform();
    const double n = norm(w);
    for (double& x : w) x *= target / n;
    const auto back = log_map_origin(exp_map_origin(w));
    double err = 0.0;
    for (std::size_t j = 0; j < dim; ++j) err += (back[j] - w[j]) * (back[j] - w[j]);
    CHECK(std::sqrt(err) <= 1e-9 * (1.0 + target));

    const double r = rng.uniform() * kMaxBallNorm;
    const std::vector<double> radial{r, 0.0};
    if (r > 0.0) {
      CHECK(distance(BallPoint::origin(2), BallPoint::from_coords(radial)) ==
            doctest::Approx(2.0 * std::atanh(r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("geometry check suite passes, and catches a sign-flipped distance") {
  GeometryCheckOptions small;
  small.radial_samples = 100;
  small.roundtrip_samples = 100;
  small.triples = 100;
  small.rotation_samples = 20;
  small.frechet_clouds = 20;
  const auto ok = run_geometry_checks(small);
  for (const auto& p : ok.properties) {
    INFO(p.name << " max_error=" << p.max_error);
    CHECK(p.passed);
  }

  small.distance = [](const BallPoint& a, const BallPoint& b) { return -distance(a, b); };
  const auto bad = run_geometry_checks(small);
  CHECK_FALSE(bad.passed());
  for (const auto& p : bad.properties) {
    if (p.name == "triangle_inequality" || p.name == "non_negativity" ||
        p.name == "radial_closed_form") {
      CHECK_FALSE(p.passed);
    }
  }
}
