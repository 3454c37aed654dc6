#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>

namespace simpcoll {

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
/// Upper tail 1 - Φ(z), accurate for large z.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

struct QuadratureOptions {
  double tol = 1e-8;             // per-integral tolerance
  unsigned max_depth = 15;       // adaptive bisection depth
  int fallback_points = 201;     // composite Simpson grid per segment
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  bool used_fallback = false;
};

/// ∫_a^b f, split at `breakpoints` (kinks of the integrand) inside (a, b).
/// Adaptive 20-point Gauss–Legendre bisection per segment; segments that miss the tolerance are
/// redone on a fixed Simpson grid and the discrepancy is reported as error.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints = {}, const QuadratureOptions& opts = {});

}  // namespace simpcoll
