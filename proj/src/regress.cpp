#include "simpcoll/regress.hpp"

#include <cmath>
#include <map>
#include <string>

namespace simpcoll {

namespace {

constexpr double kSumTol = 1e-12;

}  // namespace

StratifiedRegressionSummary::StratifiedRegressionSummary(std::span<const StratumMoments> levels) {
  if (levels.empty()) throw InputError("regression summary needs at least one level");
  const auto n = static_cast<Eigen::Index>(levels.size());
  pi_.resize(n);
  alpha_.resize(n);
  beta_.resize(n);
  mu_x_.resize(n);
  s_xx_.resize(n);
  s_yy_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& m = levels[static_cast<std::size_t>(i)];
    for (double v : {m.pi, m.alpha, m.beta, m.mu_x, m.s_xx, m.s_yy})
      if (!std::isfinite(v)) throw InputError("non-finite moment at level " + std::to_string(i));
    if (!(m.pi > 0)) throw InputError("level probabilities must be positive");
    if (!(m.s_xx > 0) || !(m.s_yy > 0)) throw InputError("conditional variances must be positive");
    // σ_yx² ≤ σ_xx σ_yy, i.e. the residual variance of Y is nonnegative.
    if (m.beta * m.beta * m.s_xx > m.s_yy * (1 + 1e-12))
      throw InputError("level " + std::to_string(i) + ": beta^2 s_xx exceeds s_yy");
    pi_(i) = m.pi;
    alpha_(i) = m.alpha;
    beta_(i) = m.beta;
    mu_x_(i) = m.mu_x;
    s_xx_(i) = m.s_xx;
    s_yy_(i) = m.s_yy;
  }
  if (std::abs(pi_.sum() - 1.0) > kSumTol) throw InputError("level probabilities must sum to 1");
}

std::vector<StratumMoments> StratifiedRegressionSummary::moments() const {
  std::vector<StratumMoments> out;
  for (Eigen::Index i = 0; i < levels(); ++i) out.push_back({pi_(i), alpha_(i), beta_(i), mu_x_(i), s_xx_(i), s_yy_(i)});
  return out;
}

double marginal_var_x(const StratifiedRegressionSummary& s) {
  return weighted_mean(s.pi(), s.s_xx()) + weighted_cov(s.pi(), s.mu_x(), s.mu_x());
}

double marginal_beta(const StratifiedRegressionSummary& s) {
  const double var_x = marginal_var_x(s);
  if (!(var_x > 0)) throw InputError("zero marginal variance of X");
  return (weighted_mean(s.pi(), s.s_yx()) + weighted_cov(s.pi(), s.mu_y(), s.mu_x())) / var_x;
}

bool is_parallel(const StratifiedRegressionSummary& s, double tol) {
  return (s.beta().array() - s.beta()(0)).abs().maxCoeff() <= tol * std::max(1.0, std::abs(s.beta()(0)));
}

namespace {

RegressVerdict base_verdict(const StratifiedRegressionSummary& s) {
  RegressVerdict v;
  v.beta_marginal = marginal_beta(s);
  v.beta_average = weighted_mean(s.pi(), s.beta());
  v.alpha_marginal = weighted_mean(s.pi(), s.mu_y()) - v.beta_marginal * weighted_mean(s.pi(), s.mu_x());
  return v;
}

// Identity sides are compared on the scale of Var(X): β̃ - target = (rhs - lhs) / Var(X).
bool decide(const RegressVerdict& v, double var_x, double tol, const char* what) {
  const bool by_identity = std::abs(v.lhs - v.rhs) <= tol * var_x;
  const bool by_slope = v.gap <= tol;
  if (by_identity != by_slope)
    throw ConsistencyError(std::string(what) + ": identity and slope routes disagree (identity gap " +
                           std::to_string(std::abs(v.lhs - v.rhs)) + ", slope gap " + std::to_string(v.gap) + ")");
  return by_slope;
}

}  // namespace

RegressVerdict check_a_collapsibility(const StratifiedRegressionSummary& s, double tol) {
  RegressVerdict v = base_verdict(s);
  const double var_x = marginal_var_x(s);
  v.lhs = v.beta_average * weighted_cov(s.pi(), s.mu_x(), s.mu_x());
  v.rhs = weighted_cov(s.pi(), s.beta(), s.s_xx()) + weighted_cov(s.pi(), s.mu_y(), s.mu_x());
  v.gap = std::abs(v.beta_marginal - v.beta_average);
  v.a_collapsible = decide(v, var_x, tol, "A-collapsibility");
  v.collapsible = is_parallel(s) && v.a_collapsible;
  return v;
}

RegressVerdict check_parallel_collapsibility(const StratifiedRegressionSummary& s, double tol) {
  if (!is_parallel(s)) throw InputError("summary is not a parallel regression model (slopes differ)");
  RegressVerdict v = base_verdict(s);
  const double var_x = marginal_var_x(s);
  v.lhs = weighted_cov(s.pi(), s.alpha(), s.mu_x());
  v.rhs = 0.0;
  v.gap = std::abs(v.beta_marginal - s.beta()(0));
  v.collapsible = decide(v, var_x, tol, "parallel collapsibility");
  v.a_collapsible = v.collapsible;
  return v;
}

SufficientConditions check_sufficient_conditions(const FiniteJoint& joint, double tol) {
  const auto& t = joint.table();
  const VarSet y = VarSet::single(FiniteJoint::kY), x = VarSet::single(FiniteJoint::kX),
               a = VarSet::single(FiniteJoint::kW);
  SufficientConditions c;
  c.y_indep_a_given_x = check_ci(t, y, a, x, tol).holds;
  c.x_indep_a_given_y = check_ci(t, x, a, y, tol).holds;
  c.a_indep_xy = check_ci(t, a, x | y, VarSet{}, tol).holds;

  const Eigen::Index na = joint.w().size(), nx = joint.x().size(), ny = joint.y().size();
  Eigen::VectorXd pi(na), mu_x(na), mu_y(na), s_xx(na), s_yy(na);
  for (Eigen::Index ia = 0; ia < na; ++ia) {
    const Bivariate b = slice_yx(joint, ia);
    const Eigen::VectorXd py = b.p.rowwise().sum();
    const Eigen::VectorXd px = b.p.colwise().sum().transpose();
    double mass = 0.0;
    for (Eigen::Index iy = 0; iy < ny; ++iy)
      for (Eigen::Index ix = 0; ix < nx; ++ix) mass += joint.p(iy, ix, ia);
    pi(ia) = mass;
    mu_y(ia) = b.y.dot(py);
    mu_x(ia) = b.x.dot(px);
    s_yy(ia) = (b.y.array() - mu_y(ia)).square().matrix().dot(py);
    s_xx(ia) = (b.x.array() - mu_x(ia)).square().matrix().dot(px);
  }
  c.variance_lhs = weighted_cov(pi, mu_y, mu_y) * weighted_mean(pi, s_yy);
  c.variance_rhs = weighted_cov(pi, mu_x, mu_x) * weighted_mean(pi, s_xx);
  c.variance_identity = std::abs(c.variance_lhs - c.variance_rhs) <= tol;

  const Bivariate marginal = marginal_yx(joint);
  c.mean_independent = true;
  for (Eigen::Index ix = 0; ix < nx; ++ix) {
    const double ey = marginal.y.dot(marginal.p.col(ix)) / marginal.p.col(ix).sum();
    for (Eigen::Index ia = 0; ia < na; ++ia) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index iy = 0; iy < ny; ++iy) {
        num += joint.y()(iy) * joint.p(iy, ix, ia);
        den += joint.p(iy, ix, ia);
      }
      if (std::abs(num / den - ey) > tol) c.mean_independent = false;
    }
  }
  c.x_support_excludes_zero = (joint.x().array() != 0.0).all();
  c.binary_response = ny == 2 && joint.y()(0) == 0.0 && joint.y()(1) == 1.0;

  c.parallel_slope_collapsible = c.y_indep_a_given_x || (c.x_indep_a_given_y && c.variance_identity);
  c.random_coefficients_a_collapsible = c.mean_independent && c.x_support_excludes_zero;
  c.logistic_both_a_collapsible = c.binary_response && c.y_indep_a_given_x;
  c.logistic_slope_a_collapsible = c.binary_response && (c.y_indep_a_given_x || c.x_indep_a_given_y);
  return c;
}

StratifiedRegressionSummary summarize_records(std::span<const Record> records, std::vector<std::string>* labels) {
  if (records.empty()) throw InputError("no records");
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Record*>> groups;
  for (const auto& r : records) {
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) throw InputError("non-finite record value");
    auto [it, inserted] = groups.try_emplace(r.a);
    if (inserted) order.push_back(r.a);
    it->second.push_back(&r);
  }
  const double total = static_cast<double>(records.size());
  std::vector<StratumMoments> levels;
  for (const auto& key : order) {
    const auto& g = groups[key];
    const double n = static_cast<double>(g.size());
    double mx = 0, my = 0;
    for (const Record* r : g) {
      mx += r->x;
      my += r->y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, syx = 0;
    for (const Record* r : g) {
      sxx += (r->x - mx) * (r->x - mx);
      syy += (r->y - my) * (r->y - my);
      syx += (r->y - my) * (r->x - mx);
    }
    sxx /= n;
    syy /= n;
    syx /= n;
    if (!(sxx > 0)) throw InputError("stratum '" + key + "' has no variation in x");
    if (!(syy > 0)) throw InputError("stratum '" + key + "' has no variation in y");
    const double beta = syx / sxx;
    levels.push_back({n / total, my - beta * mx, beta, mx, sxx, syy});
  }
  // Rounding in n/total must not trip the unit-sum check.
  double psum = 0;
  for (const auto& l : levels) psum += l.pi;
  for (auto& l : levels) l.pi /= psum;
  if (labels) *labels = order;
  return StratifiedRegressionSummary(levels);
}

}  // namespace simpcoll
