#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "simpcoll/assoc.hpp"

namespace simpcoll {

/// π-weighted mean of a per-level quantity.
template <class Weights, class Values>
double weighted_mean(const Eigen::DenseBase<Weights>& pi, const Eigen::DenseBase<Values>& v) {
  return (pi.derived().array() * v.derived().array()).sum();
}

/// π-weighted covariance Cov_A(a(A), b(A)).
template <class Weights, class A, class B>
double weighted_cov(const Eigen::DenseBase<Weights>& pi, const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  const double ma = weighted_mean(pi, a), mb = weighted_mean(pi, b);
  return (pi.derived().array() * (a.derived().array() - ma) * (b.derived().array() - mb)).sum();
}

struct StratumMoments {
  double pi = 0;
  double alpha = 0;
  double beta = 0;
  double mu_x = 0;
  double s_xx = 0;
  double s_yy = 0;
};

/// Per-level moments of (Y, X) given a discrete background variable A.
///
/// μ_y(i) = α(i) + β(i) μ_x(i) and σ_yx(i) = β(i) σ_xx(i) are derived, never
/// supplied, so the moments are consistent with the per-level linear model.
class StratifiedRegressionSummary {
 public:
  explicit StratifiedRegressionSummary(std::span<const StratumMoments> levels);

  Eigen::Index levels() const { return pi_.size(); }
  const Eigen::VectorXd& pi() const { return pi_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& mu_x() const { return mu_x_; }
  const Eigen::VectorXd& s_xx() const { return s_xx_; }
  const Eigen::VectorXd& s_yy() const { return s_yy_; }
  Eigen::VectorXd mu_y() const { return (alpha_.array() + beta_.array() * mu_x_.array()).matrix(); }
  Eigen::VectorXd s_yx() const { return (beta_.array() * s_xx_.array()).matrix(); }

  std::vector<StratumMoments> moments() const;

 private:
  Eigen::VectorXd pi_, alpha_, beta_, mu_x_, s_xx_, s_yy_;
};

/// Var(X) = E_A σ_xx(A) + Var_A μ_x(A).
double marginal_var_x(const StratifiedRegressionSummary& s);
/// β̃ = Cov(Y,X)/Var(X) by the laws of total covariance and variance.
double marginal_beta(const StratifiedRegressionSummary& s);

struct RegressVerdict {
  double beta_marginal = 0.0;
  double alpha_marginal = 0.0;
  double beta_average = 0.0;  // E_A β(A)
  bool collapsible = false;   // parallel model: β̃ = β
  bool a_collapsible = false; // β̃ = E_A β(A)
  /// Sides of the deciding identity. Parallel: Cov_A(α, μ_x) vs 0.
  /// Random-coefficient: E_A β · V(μ_x) vs Cov(β, σ_xx) + Cov(μ_y, μ_x).
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // |β̃ - β| or |β̃ - E_A β|
};

/// Collapsibility of the common slope of a parallel regression model.
RegressVerdict check_parallel_collapsibility(const StratifiedRegressionSummary& s, double tol = kDefaultTol);
/// Average collapsibility of a random-coefficient slope β(A).
RegressVerdict check_a_collapsibility(const StratifiedRegressionSummary& s, double tol = kDefaultTol);

bool is_parallel(const StratifiedRegressionSummary& s, double tol = 1e-12);

/// Independence and moment conditions on a finite joint of (Y, X, A), with A
/// in the joint's W slot, and the collapsibility conclusions they imply.
struct SufficientConditions {
  bool y_indep_a_given_x = false;
  bool x_indep_a_given_y = false;
  bool a_indep_xy = false;
  /// V_A(μ_y(A)) E_A(σ_yy(A)) = V_A(μ_x(A)) E_A(σ_xx(A)).
  bool variance_identity = false;
  double variance_lhs = 0.0;
  double variance_rhs = 0.0;
  /// E(Y|X,A) = E(Y|X) at every support point of X.
  bool mean_independent = false;
  bool x_support_excludes_zero = false;
  bool binary_response = false;

  /// Parallel-model slope collapsible.
  bool parallel_slope_collapsible = false;
  /// Random-coefficient intercept and slope both average collapsible.
  bool random_coefficients_a_collapsible = false;
  /// Logistic model: intercept and slope, or slope only, average collapsible.
  bool logistic_both_a_collapsible = false;
  bool logistic_slope_a_collapsible = false;
};

SufficientConditions check_sufficient_conditions(const FiniteJoint& joint, double tol = kDefaultTol);

struct Record {
  double y = 0;
  double x = 0;
  std::string a;
};

/// Per-stratum population moments (divisor N) of raw (y, x, a) records; strata in first-appearance order.
StratifiedRegressionSummary summarize_records(std::span<const Record> records, std::vector<std::string>* labels = nullptr);

}  // namespace simpcoll
