#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simpcoll/assoc.hpp"
#include "simpcoll/regress.hpp"
#include "simpcoll/table.hpp"

namespace simpcoll::testing {

inline std::string fixture(const std::string& name) { return std::string(SIMPCOLL_FIXTURES) + "/" + name; }

/// Example 1: admission (A: Y/N) by sex (X: M/F) and department (D: H/G).
inline ContingencyTable berkeley() {
  CategoricalScheme s({{"A", {"Y", "N"}}, {"X", {"M", "F"}}, {"D", {"H", "G"}}});
  const double c[] = {1, 6, 2, 4, 4, 2, 6, 1};
  return build_table(s, c, TableForm::counts);
}

/// Example 2: accused race, victim race, death penalty (Y/N).
inline ContingencyTable death_penalty() {
  CategoricalScheme s({{"accused", {"W", "B"}}, {"victim", {"W", "B"}}, {"death", {"Y", "N"}}});
  const double c[] = {19, 132, 0, 9, 11, 52, 6, 97};
  return build_table(s, c, TableForm::counts);
}

inline CategoricalScheme random_scheme(std::mt19937_64& rng, int max_vars, int max_levels, int min_vars = 1) {
  std::uniform_int_distribution<int> nv(min_vars, max_vars), nl(2, max_levels);
  const int n = nv(rng);
  std::vector<Variable> vars;
  for (int j = 0; j < n; ++j) {
    Variable v{"v" + std::to_string(j + 1), {}};
    const int m = nl(rng);
    for (int l = 0; l < m; ++l) v.levels.push_back("l" + std::to_string(l));
    vars.push_back(std::move(v));
  }
  return CategoricalScheme(std::move(vars));
}

inline Eigen::ArrayXd random_positive(std::mt19937_64& rng, Eigen::Index size, double lo = 0.05, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::ArrayXd a(size);
  for (Eigen::Index i = 0; i < size; ++i) a(i) = u(rng);
  return a;
}

inline ContingencyTable random_probability_table(std::mt19937_64& rng, const CategoricalScheme& scheme) {
  Eigen::ArrayXd c = random_positive(rng, scheme.cell_count());
  c /= c.sum();
  return ContingencyTable(scheme, c, TableForm::probability);
}

/// p(i) ∝ f(i_A, i_B) g(i_B, i_C): X_A ⊥ X_C | X_B by construction.
inline ContingencyTable ci_table(std::mt19937_64& rng, const CategoricalScheme& scheme, VarSet a, VarSet b, VarSet c) {
  const Eigen::ArrayXd f = random_positive(rng, scheme.cell_count(a | b));
  const Eigen::ArrayXd g = random_positive(rng, scheme.cell_count(b | c));
  Eigen::ArrayXd cells = broadcast(scheme, f, a | b, scheme.all()) * broadcast(scheme, g, b | c, scheme.all());
  cells /= cells.sum();
  return ContingencyTable(scheme, cells, TableForm::probability);
}

inline Eigen::VectorXd support(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = i;
  return v;
}

/// Joint of (Y, X, W) on {0..ny-1}×{0..nx-1}×{0..nw-1} from unnormalized cells.
inline FiniteJoint joint_from(int ny, int nx, int nw, Eigen::ArrayXd cells) {
  cells /= cells.sum();
  std::vector<double> p(cells.data(), cells.data() + cells.size());
  return FiniteJoint(support(ny), support(nx), support(nw), p);
}

/// Which of W⊥Y, W⊥X, W⊥Y|X, W⊥X|Y a constructed joint satisfies.
enum class Linkage { a, b, c, d };

/// Random positive joint satisfying one of the four conditions by
/// factorization. The kernel linking X and Y is tilted toward negative
/// dependence so that conditional R3 "down" holds in a good share of draws,
/// which keeps the no-reversal property test from passing vacuously.
inline FiniteJoint samuels_joint(std::mt19937_64& rng, Linkage kind, int ny, int nx, int nw) {
  std::uniform_real_distribution<double> tilt(0.3, 2.0), noise(-0.15, 0.15);
  const double s = tilt(rng);
  auto kernel = [&](int n_from, int n_to) {  // rows: from, cols: to; decreasing in from
    Eigen::MatrixXd k(n_from, n_to);
    for (int i = 0; i < n_from; ++i)
      for (int j = 0; j < n_to; ++j) k(i, j) = std::exp(-s * i * j + noise(rng));
    for (int i = 0; i < n_from; ++i) k.row(i) /= k.row(i).sum();
    return k;
  };
  auto law = [&](int n) {
    Eigen::VectorXd v = random_positive(rng, n, 0.05, 1.0).matrix();
    return Eigen::VectorXd(v / v.sum());
  };
  auto stochastic = [&](int rows, int cols) {  // arbitrary row-stochastic matrix
    Eigen::MatrixXd m = random_positive(rng, rows * cols, 0.02, 1.0).matrix().reshaped(rows, cols);
    for (int i = 0; i < rows; ++i) m.row(i) /= m.row(i).sum();
    return m;
  };
  Eigen::ArrayXd cells(ny * nx * nw);
  auto at = [&](int y, int x, int w) -> double& { return cells((y * nx + x) * nw + w); };
  switch (kind) {
    case Linkage::a: {  // p(y) p(w) p(x | y, w)
      const Eigen::VectorXd py = law(ny), pw = law(nw);
      for (int w = 0; w < nw; ++w) {
        const Eigen::MatrixXd kx = kernel(ny, nx);
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) at(y, x, w) = py(y) * pw(w) * kx(y, x);
      }
      break;
    }
    case Linkage::b: {  // p(x) p(w) p(y | x, w)
      const Eigen::VectorXd px = law(nx), pw = law(nw);
      for (int w = 0; w < nw; ++w) {
        const Eigen::MatrixXd ky = kernel(nx, ny);
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) at(y, x, w) = px(x) * pw(w) * ky(x, y);
      }
      break;
    }
    case Linkage::c: {  // p(w) p(x | w) p(y | x)
      const Eigen::VectorXd pw = law(nw);
      const Eigen::MatrixXd px_w = stochastic(nw, nx), ky = kernel(nx, ny);
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
          for (int w = 0; w < nw; ++w) at(y, x, w) = pw(w) * px_w(w, x) * ky(x, y);
      break;
    }
    case Linkage::d: {  // p(y) p(w | y) p(x | y)
      const Eigen::VectorXd py = law(ny);
      const Eigen::MatrixXd pw_y = stochastic(ny, nw), kx = kernel(ny, nx);
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
          for (int w = 0; w < nw; ++w) at(y, x, w) = py(y) * pw_y(y, w) * kx(y, x);
      break;
    }
  }
  return joint_from(ny, nx, nw, cells);
}

/// W⊥X|Y holds, yet Cov(Y,X|W=w) < 0 for both w while Cov(Y,X) > 0.
///
/// W splits Y into {0,1} and {2,3}; within each half X swaps the order of
/// Y, while across halves X tracks Y.
inline FiniteJoint r4_counterexample() {
  const int m[] = {1, 0, 3, 2};
  Eigen::ArrayXd cells(4 * 4 * 2);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int w = 0; w < 2; ++w) {
        const double pw = (w == 0) == (y < 2) ? 0.95 : 0.05;
        const double px = x == m[y] ? 0.85 : 0.05;
        cells((y * 4 + x) * 2 + w) = 0.25 * pw * px;
      }
  return joint_from(4, 4, 2, cells);
}

/// max over j ∈ A of |Σ_{i_j} τ_A(i_A)|; zero for a centered interaction term.
inline double max_centering(const CategoricalScheme& s, const Eigen::ArrayXd& tau, VarSet a) {
  double worst = 0;
  for (int j : a.members()) {
    const VarSet rest = a - VarSet::single(j);
    const auto sub = s.restrict_to(a);
    const Eigen::ArrayXd sums = sum_onto(sub, tau, sub.all(), rest.relative_to(a));
    worst = std::max(worst, sums.abs().maxCoeff());
  }
  return worst;
}

inline std::vector<StratumMoments> random_levels(std::mt19937_64& rng, int n, bool parallel) {
  std::uniform_real_distribution<double> u(-2, 2), pos(0.3, 2.0);
  Eigen::ArrayXd pi = random_positive(rng, n);
  pi /= pi.sum();
  const double common = u(rng);
  std::vector<StratumMoments> out;
  for (int i = 0; i < n; ++i) {
    StratumMoments m{pi(i), u(rng), parallel ? common : u(rng), u(rng), pos(rng), 0.0};
    m.s_yy = m.beta * m.beta * m.s_xx + pos(rng);
    out.push_back(m);
  }
  return out;
}

inline Eigen::VectorXd column(const std::vector<StratumMoments>& m, double StratumMoments::*f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) v(static_cast<Eigen::Index>(i)) = m[i].*f;
  return v;
}

// Shift α along μ_x - E μ_x so that Cov_A(α, μ_x) = target.
inline void set_cov_alpha_mux(std::vector<StratumMoments>& m, double target) {
  const Eigen::VectorXd pi = column(m, &StratumMoments::pi), mx = column(m, &StratumMoments::mu_x),
                        a = column(m, &StratumMoments::alpha);
  const double c = (target - weighted_cov(pi, a, mx)) / weighted_cov(pi, mx, mx);
  const double emx = weighted_mean(pi, mx);
  for (auto& l : m) l.alpha += c * (l.mu_x - emx);
}

// Choose Cov(α, μ_x) so that the average-collapsibility identity holds exactly.
inline void make_a_collapsible(std::vector<StratumMoments>& m) {
  const Eigen::VectorXd pi = column(m, &StratumMoments::pi), mx = column(m, &StratumMoments::mu_x),
                        b = column(m, &StratumMoments::beta), sxx = column(m, &StratumMoments::s_xx);
  const double target = weighted_mean(pi, b) * weighted_cov(pi, mx, mx) - weighted_cov(pi, b, sxx) -
                        weighted_cov(pi, Eigen::VectorXd(b.cwiseProduct(mx)), mx);
  set_cov_alpha_mux(m, target);
}

// Weighted least-squares slope of y on x over an explicit finite mixture realizing the moments.
inline double mixture_ls_slope(const StratifiedRegressionSummary& s) {
  const Eigen::Index n = s.levels() * 4;
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n), w(n);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.levels(); ++i) {
    const double sx = std::sqrt(s.s_xx()(i));
    const double se = std::sqrt(s.s_yy()(i) - s.beta()(i) * s.beta()(i) * s.s_xx()(i));
    for (double dx : {-1.0, 1.0})
      for (double de : {-1.0, 1.0}) {
        const double x = s.mu_x()(i) + dx * sx;
        design(r, 0) = 1.0;
        design(r, 1) = x;
        y(r) = s.alpha()(i) + s.beta()(i) * x + de * se;
        w(r) = s.pi()(i) / 4.0;
        ++r;
      }
  }
  const Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
  const Eigen::Vector2d coef = (xtw * design).ldlt().solve(xtw * y);
  return coef(1);
}

}  // namespace simpcoll::testing
