#include "tdha/poincare.hpp"

#include <cmath>
#include <string>

#include "tdha/error.hpp"

namespace tdha {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidInputError(std::string(what) + ": non-finite coordinate");
    }
  }
}

void require_same_dim(std::span<const BallPoint> points) {
  for (const auto& p : points) {
    if (p.dim() != points.front().dim()) {
      throw ShapeError("ball points have mismatched dimensions");
    }
  }
}

// x (+) y, Moebius addition on the unit ball.
Vector mobius_add(std::span<const double> x, std::span<const double> y) {
  const double xy = dot(x, y);
  const double x2 = squared_norm(x);
  const double y2 = squared_norm(y);
  const double cx = 1.0 + 2.0 * xy + y2;
  const double cy = 1.0 - x2;
  const double den = 1.0 + 2.0 * xy + x2 * y2;
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (cx * x[i] + cy * y[i]) / den;
  }
  return out;
}

// Riemannian log at base point z, expressed in ambient coordinates.
Vector log_map_at(std::span<const double> z, std::span<const double> x) {
  Vector neg_z(z.begin(), z.end());
  for (double& c : neg_z) c = -c;
  Vector u = mobius_add(neg_z, x);
  const double nu = norm(u);
  if (nu == 0.0) return Vector(z.size(), 0.0);
  const double scale = (1.0 - squared_norm(z)) * std::atanh(std::min(nu, kMaxBallNorm)) / nu;
  for (double& c : u) c *= scale;
  return u;
}

Vector exp_map_at(std::span<const double> z, std::span<const double> v) {
  const double nv = norm(v);
  if (nv == 0.0) return Vector(z.begin(), z.end());
  const double lambda = 2.0 / (1.0 - squared_norm(z));
  const double s = std::tanh(0.5 * lambda * nv) / nv;
  Vector t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = s * v[i];
  return mobius_add(z, t);
}

}  // namespace

BallPoint clamp_into_ball(Vector coords) {
  const double n = norm(coords);
  if (n > kMaxBallNorm) {
    double s = kMaxBallNorm / n;
    for (double& c : coords) c *= s;
    // rounding can leave the norm a few ulps above the bound
    while (norm(coords) > kMaxBallNorm) {
      for (double& c : coords) c *= (1.0 - 1e-15);
    }
  }
  return BallPoint(std::move(coords));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

BallPoint BallPoint::origin(std::size_t dim) { return BallPoint(Vector(dim, 0.0)); }

BallPoint BallPoint::from_coords(std::span<const double> coords) {
  require_finite(coords, "BallPoint");
  if (tdha::squared_norm(coords) >= 1.0) {
    throw DomainError("BallPoint: point lies on or outside the unit sphere");
  }
  return clamp_into_ball(Vector(coords.begin(), coords.end()));
}

double BallPoint::squared_norm() const noexcept { return tdha::squared_norm(coords_); }

double BallPoint::norm() const noexcept { return tdha::norm(coords_); }

double arcosh1p(double x) {
  if (x < 1e-8) {
    // arcosh(1+x) = sqrt(2x) (1 - x/12 + O(x^2))
    return std::sqrt(2.0 * x) * (1.0 - x / 12.0);
  }
  return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

BallPoint exp_map_origin(std::span<const double> w) {
  require_finite(w, "exp_map_origin");
  const double n = norm(w);
  if (n == 0.0) return BallPoint::origin(w.size());
  const double s = std::tanh(n) / n;
  Vector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = s * w[i];
  return clamp_into_ball(std::move(out));
}

Vector log_map_origin(const BallPoint& y) {
  const auto c = y.coords();
  const double n = y.norm();
  if (n >= 1.0) throw DomainError("log_map_origin: point outside the unit ball");
  Vector out(c.size(), 0.0);
  if (n == 0.0) return out;
  const double s = std::atanh(n) / n;
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = s * c[i];
  return out;
}

double distance(const BallPoint& a, const BallPoint& b) {
  if (a.dim() != b.dim()) throw ShapeError("distance: dimension mismatch");
  const auto ac = a.coords();
  const auto bc = b.coords();
  double diff2 = 0.0;
  for (std::size_t i = 0; i < ac.size(); ++i) {
    const double d = ac[i] - bc[i];
    diff2 += d * d;
  }
  const double da = 1.0 - a.squared_norm();
  const double db = 1.0 - b.squared_norm();
  if (!(da > 0.0) || !(db > 0.0)) {
    throw DomainError("distance: argument on or outside the unit sphere");
  }
  return arcosh1p(2.0 * diff2 / (da * db));
}

double conformal_factor(std::span<const double> a) {
  require_finite(a, "conformal_factor");
  const double n2 = squared_norm(a);
  if (n2 >= 1.0) throw DomainError("conformal_factor: point outside the unit ball");
  return 1.0 / (1.0 - n2);
}

double conformal_factor(const BallPoint& a) { return conformal_factor(a.coords()); }

BallPoint ambient_mean(std::span<const BallPoint> points) {
  if (points.empty()) throw InvalidInputError("ambient_mean: empty point set");
  require_same_dim(points);
  Vector acc(points.front().dim(), 0.0);
  for (const auto& p : points) {
    const auto c = p.coords();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c[i];
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  for (double& x : acc) x *= inv;
  return clamp_into_ball(std::move(acc));
}

BallPoint tangent_mean(std::span<const BallPoint> points) {
  if (points.empty()) throw InvalidInputError("tangent_mean: empty point set");
  require_same_dim(points);
  Vector acc(points.front().dim(), 0.0);
  for (const auto& p : points) {
    const Vector t = log_map_origin(p);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += t[i];
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  for (double& x : acc) x *= inv;
  return exp_map_origin(acc);
}

BallPoint frechet_mean_oracle(std::span<const BallPoint> points, const FrechetOptions& options) {
  if (points.empty()) throw InvalidInputError("frechet_mean_oracle: empty point set");
  require_same_dim(points);
  const std::size_t dim = points.front().dim();
  const double inv = 1.0 / static_cast<double>(points.size());

  const BallPoint start = ambient_mean(points);
  Vector z(start.coords().begin(), start.coords().end());
  double step = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    Vector v(dim, 0.0);
    for (const auto& p : points) {
      const Vector l = log_map_at(z, p.coords());
      for (std::size_t i = 0; i < dim; ++i) v[i] += l[i];
    }
    for (double& x : v) x *= inv;
    step = 2.0 / (1.0 - squared_norm(z)) * norm(v);
    z = exp_map_at(z, v);
    if (step < options.tolerance) return clamp_into_ball(std::move(z));
  }
  throw ConvergenceError("frechet_mean_oracle: no convergence after " +
                         std::to_string(options.max_iterations) +
                         " iterations, last step " + std::to_string(step));
}

}  // namespace tdha
