#include "tdha/geometry_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "tdha/rng.hpp"

namespace tdha {

namespace {

using Clock = std::chrono::steady_clock;

Vector random_direction(KeyedRng& rng, std::size_t dim) {
  Vector v(dim);
  double n = 0.0;
  while (n == 0.0) {
    for (double& x : v) x = rng.normal();
    n = norm(v);
  }
  for (double& x : v) x /= n;
  return v;
}

Vector scaled(Vector v, double s) {
  for (double& x : v) x *= s;
  return v;
}

BallPoint random_ball_point(KeyedRng& rng, std::size_t dim, double max_norm) {
  // sequenced explicitly: argument evaluation order differs between compilers
  const Vector dir = random_direction(rng, dim);
  return BallPoint::from_coords(scaled(dir, max_norm * rng.uniform()));
}

// Product of three random Householder reflections.
struct RandomOrthogonal {
  std::vector<Vector> normals;
  Vector apply(std::span<const double> x) const {
    Vector y(x.begin(), x.end());
    for (const auto& u : normals) {
      const double s = 2.0 * dot(u, y);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] -= s * u[i];
    }
    return y;
  }
};

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

PropertyResult finish(std::string name, double max_error, double tolerance, std::size_t samples,
                      const Timer& t) {
  return {std::move(name), max_error <= tolerance, max_error, tolerance, samples, t.seconds()};
}

}  // namespace

bool GeometryCheckReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

GeometryCheckReport run_geometry_checks(const GeometryCheckOptions& options) {
  GeometryCheckReport report;
  const auto& dist = options.distance;

  {
    Timer t;
    KeyedRng rng(mix_keys({options.seed, 1}));
    std::vector<double> radii{1e-12, 1e-9, 1e-6, 1e-4, 0.5, 0.9, 0.999, kMaxBallNorm - 1e-12};
    while (radii.size() < options.radial_samples) {
      const double r = rng.uniform() * kMaxBallNorm;
      if (r > 0.0) radii.push_back(r);
    }
    double worst = 0.0;
    for (double r : radii) {
      const double coords[] = {r, 0.0, 0.0};
      const double d = dist(BallPoint::origin(3), BallPoint::from_coords(coords));
      const double expected = 2.0 * std::atanh(r);
      worst = std::max(worst, std::abs(d - expected) / expected);
    }
    report.properties.push_back(finish("radial_closed_form", worst, 1e-9, radii.size(), t));
  }

  {
    Timer t;
    KeyedRng rng(mix_keys({options.seed, 2}));
    double worst = 0.0;
    std::size_t n = 0;
    for (std::size_t dim : options.dims) {
      for (std::size_t i = 0; i < options.roundtrip_samples; ++i, ++n) {
        const double len = i == 0 ? 0.0 : (i == 1 ? 5.0 : 5.0 * rng.uniform());
        const Vector w = scaled(random_direction(rng, dim), len);
        const Vector back = log_map_origin(exp_map_origin(w));
        double err2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) err2 += (back[j] - w[j]) * (back[j] - w[j]);
        worst = std::max(worst, std::sqrt(err2) / (1.0 + len));
      }
    }
    report.properties.push_back(finish("exp_log_round_trip", worst, 1e-9, n, t));
  }

  {
    Timer t;
    KeyedRng rng(mix_keys({options.seed, 3}));
    double sym = 0.0, ident = 0.0, neg = 0.0, tri = 0.0;
    std::size_t n = 0;
    for (std::size_t dim : options.dims) {
      for (std::size_t i = 0; i < options.triples; ++i, ++n) {
        const BallPoint a = random_ball_point(rng, dim, 0.99);
        const BallPoint b = random_ball_point(rng, dim, 0.99);
        const BallPoint c = random_ball_point(rng, dim, 0.99);
        const double ab = dist(a, b), ba = dist(b, a), bc = dist(b, c), ac = dist(a, c);
        sym = std::max(sym, std::abs(ab - ba));
        ident = std::max(ident, std::abs(dist(a, a)));
        neg = std::max({neg, -ab, -bc, -ac});
        tri = std::max(tri, ac - ab - bc);
      }
    }
    report.properties.push_back(finish("symmetry", sym, 1e-12, n, t));
    report.properties.push_back(finish("identity", ident, 1e-12, n, t));
    report.properties.push_back(finish("non_negativity", neg, 0.0, n, t));
    report.properties.push_back(finish("triangle_inequality", tri, 1e-9, n, t));
  }

  {
    Timer t;
    KeyedRng rng(mix_keys({options.seed, 4}));
    double worst = 0.0;
    std::size_t n = 0;
    for (std::size_t dim : options.dims) {
      for (std::size_t i = 0; i < options.rotation_samples; ++i, ++n) {
        RandomOrthogonal q;
        for (int h = 0; h < 3; ++h) q.normals.push_back(random_direction(rng, dim));
        const BallPoint a = random_ball_point(rng, dim, 0.95);
        const BallPoint b = random_ball_point(rng, dim, 0.95);
        const double before = dist(a, b);
        const double after =
            dist(BallPoint::from_coords(q.apply(a.coords())), BallPoint::from_coords(q.apply(b.coords())));
        worst = std::max(worst, std::abs(after - before) / std::max(1.0, std::abs(before)));
      }
    }
    report.properties.push_back(finish("rotation_isometry", worst, 1e-9, n, t));
  }

  {
    Timer t;
    KeyedRng rng(mix_keys({options.seed, 5}));
    double worst = 0.0;
    for (std::size_t c = 0; c < options.frechet_clouds; ++c) {
      const std::size_t count = 1 + rng.below(10);
      std::vector<BallPoint> cloud;
      for (std::size_t i = 0; i < count; ++i) cloud.push_back(random_ball_point(rng, 8, 0.1));
      worst = std::max(worst, tdha::distance(tangent_mean(cloud), frechet_mean_oracle(cloud)));
    }
    report.properties.push_back(finish("frechet_first_order", worst, 1e-3, options.frechet_clouds, t));
  }

  {
    Timer t;
    KeyedRng rng(mix_keys({options.seed, 6}));
    double worst = 0.0;
    for (std::size_t c = 0; c < options.frechet_clouds; ++c) {
      const std::size_t count = 1 + rng.below(10);
      std::vector<BallPoint> cloud;
      for (std::size_t i = 0; i < count; ++i) cloud.push_back(random_ball_point(rng, 8, 0.01));
      worst = std::max(worst, tdha::distance(ambient_mean(cloud), tangent_mean(cloud)));
    }
    report.properties.push_back(finish("small_norm_means", worst, 1e-6, options.frechet_clouds, t));
  }

  return report;
}

}  // namespace tdha
