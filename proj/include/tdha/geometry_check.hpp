#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tdha/poincare.hpp"

namespace tdha {

using DistanceFn = std::function<double(const BallPoint&, const BallPoint&)>;

struct PropertyResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  double seconds = 0.0;
};

struct GeometryCheckReport {
  std::vector<PropertyResult> properties;
  bool passed() const;
};

struct GeometryCheckOptions {
  std::uint64_t seed = 20240601;
  std::size_t radial_samples = 1000;
  std::size_t roundtrip_samples = 1000;
  std::size_t triples = 1000;
  std::size_t rotation_samples = 200;
  std::size_t frechet_clouds = 100;
  std::vector<std::size_t> dims{2, 8, 512};
  /// Distance under test; swapped out by the fault-injection self test.
  DistanceFn distance = [](const BallPoint& a, const BallPoint& b) { return tdha::distance(a, b); };
};

/// Runs the geometric invariant suite. Each property records its worst-case
/// error against its tolerance:
///   radial_closed_form   |d(0,r e1) - 2 artanh r| / (2 artanh r)        <= 1e-9
///   exp_log_round_trip   |log0(exp0 w) - w| / (1 + |w|), |w| <= 5       <= 1e-9
///   symmetry             |d(a,b) - d(b,a)|                              <= 1e-12
///   identity             |d(a,a)|                                       <= 1e-12
///   non_negativity       max(0, -d(a,b))                                <= 0
///   triangle_inequality  max(0, d(a,c) - d(a,b) - d(b,c))               <= 1e-9
///   rotation_isometry    |d(Qa,Qb) - d(a,b)| / max(1, d(a,b))           <= 1e-9
///   frechet_first_order  d(tangent_mean, frechet_mean), |x| <= 0.1, d=8 <= 1e-3
///   small_norm_means     d(ambient_mean, tangent_mean), |x| <= 0.01     <= 1e-6
GeometryCheckReport run_geometry_checks(const GeometryCheckOptions& options = {});

}  // namespace tdha
