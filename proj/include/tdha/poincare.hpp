#pragma once

// Curvature -1 Poincare ball geometry.
//
// Points live strictly inside the unit ball. Every BallPoint is clamped to
// norm <= kMaxBallNorm on construction so that (1 - |a|^2) never underflows
// in the distance formula.

#include <cstddef>
#include <span>
#include <vector>

namespace tdha {

using Vector = std::vector<double>;

inline constexpr double kMaxBallNorm = 1.0 - 1e-6;

class BallPoint {
 public:
  BallPoint() = default;

  static BallPoint origin(std::size_t dim);

  /// Validates finiteness and |coords| < 1, then clamps into kMaxBallNorm.
  /// Throws DomainError for points on or outside the unit sphere.
  static BallPoint from_coords(std::span<const double> coords);

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double squared_norm() const noexcept;
  double norm() const noexcept;

  friend bool operator==(const BallPoint&, const BallPoint&) = default;

 private:
  explicit BallPoint(Vector coords) : coords_(std::move(coords)) {}
  friend BallPoint clamp_into_ball(Vector coords);

  Vector coords_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double norm(std::span<const double> v);

/// arcosh(1 + x) for x >= 0 without cancellation near x = 0.
double arcosh1p(double x);

/// tanh(|w|) w / |w|; the origin maps to the origin.
BallPoint exp_map_origin(std::span<const double> w);

/// artanh(|y|) y / |y|; inverse of exp_map_origin.
Vector log_map_origin(const BallPoint& y);

double distance(const BallPoint& a, const BallPoint& b);

/// (1 - |a|^2)^-1. Note this is half of the factor implied by the distance
/// above; it is reported as a standalone value and not used elsewhere.
/// Accepts raw coordinates (no clamp) so it can be probed near the boundary.
double conformal_factor(std::span<const double> a);
double conformal_factor(const BallPoint& a);

/// Coordinate-wise mean of ball points; stays inside by convexity.
BallPoint ambient_mean(std::span<const BallPoint> points);

/// exp_0 of the mean of log_0 of the points. First-order Frechet mean.
BallPoint tangent_mean(std::span<const BallPoint> points);

struct FrechetOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

/// Karcher iteration z <- exp_z(mean_i log_z(x_i)) until the geodesic step
/// length drops below `tolerance`. Reference only; the inference path never
/// calls it. Throws ConvergenceError carrying the final step length.
BallPoint frechet_mean_oracle(std::span<const BallPoint> points,
                              const FrechetOptions& options = {});

}  // namespace tdha
