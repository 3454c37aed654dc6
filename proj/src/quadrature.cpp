#include "simpcoll/quadrature.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <vector>

namespace simpcoll {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int points) {
  const int n = std::max(3, points | 1) - 1;  // even number of intervals
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

constexpr int kNodes = 20;

struct Rule {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
};

// Gauss–Legendre nodes on [-1, 1] by Newton iteration on P_n.
const Rule& legendre_rule() {
  static const Rule rule = [] {
    Rule r;
    for (int i = 0; i < kNodes; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= kNodes; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kNodes * (z * p1 - p0) / (z * z - 1.0);
        const double step = p1 / dp;
        z -= step;
        if (std::abs(step) < 1e-16) break;
      }
      r.x[static_cast<std::size_t>(i)] = z;
      r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
  }();
  return rule;
}

struct Panel {
  double value = 0.0;
  double l1 = 0.0;
};

Panel gauss(const std::function<double(double)>& f, double a, double b) {
  const auto& r = legendre_rule();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  Panel p;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double v = f(mid + half * r.x[i]);
    p.value += r.w[i] * v;
    p.l1 += r.w[i] * std::abs(v);
  }
  p.value *= half;
  p.l1 *= std::abs(half);
  return p;
}

struct Adaptive {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Accept a panel once its two halves reproduce it; otherwise bisect with half the budget.
Adaptive adapt(const std::function<double(double)>& f, double a, double b, const Panel& whole, double tol,
               unsigned depth) {
  const double m = 0.5 * (a + b);
  const Panel left = gauss(f, a, m), right = gauss(f, m, b);
  const double err = std::abs(left.value + right.value - whole.value);
  if (err <= tol || depth == 0 || m <= a || m >= b)
    return {left.value + right.value, err, left.l1 + right.l1};
  const Adaptive l = adapt(f, a, m, left, 0.5 * tol, depth - 1);
  const Adaptive r = adapt(f, m, b, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error + r.error, l.l1 + r.l1};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& opts) {
  std::vector<double> knots{a};
  for (double p : breakpoints)
    if (p > a && p < b) knots.push_back(p);
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());

  QuadratureResult out;
  out.converged = true;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = knots[k], hi = knots[k + 1];
    if (hi <= lo) continue;
    const Panel whole = gauss(f, lo, hi);
    const Adaptive res = adapt(f, lo, hi, whole, opts.tol * std::max(1.0, whole.l1), opts.max_depth);
    const double v = res.value, err = res.error, l1 = res.l1;
    if (err <= opts.tol * std::max(1.0, l1)) {
      out.value += v;
      out.error += err;
      continue;
    }
    const double fallback = simpson(f, lo, hi, opts.fallback_points);
    out.value += fallback;
    out.error += std::abs(fallback - v);
    out.used_fallback = true;
    out.converged = false;
  }
  return out;
}

}  // namespace simpcoll
