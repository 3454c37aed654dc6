#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "simpcoll/table.hpp"

namespace simpcoll {

/// Positive joint distribution of (Y, X, W) on finite numeric supports.
///
/// The underlying table has variables "y", "x", "w" (row-major, w fastest);
/// level labels are the decimal renderings of the support points.
class FiniteJoint {
 public:
  FiniteJoint(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::VectorXd w, std::span<const double> p);
  FiniteJoint(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::VectorXd w, ContingencyTable table);

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& w() const { return w_; }
  const ContingencyTable& table() const { return table_; }
  double p(Eigen::Index iy, Eigen::Index ix, Eigen::Index iw) const {
    return table_.cells()((iy * x_.size() + ix) * w_.size() + iw);
  }

  static constexpr int kY = 0, kX = 1, kW = 2;

 private:
  Eigen::VectorXd y_, x_, w_;
  ContingencyTable table_;
};

/// Joint law of (Y, X): rows index y levels, columns index x levels.
struct Bivariate {
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  Eigen::MatrixXd p;
};

Bivariate marginal_yx(const FiniteJoint& joint);
/// Conditional law of (Y, X) given W = w-level `iw`.
Bivariate slice_yx(const FiniteJoint& joint, Eigen::Index iw);
/// Swap the roles of Y and X.
Bivariate transposed(const Bivariate& b);

enum class Relation { r1, r2, r3, r4 };
enum class Direction { up, down };

Relation parse_relation(const std::string& s);
std::string to_string(Relation r);
std::string to_string(Direction d);

struct RelationCheck {
  bool holds = false;   // weak inequalities (or Cov sign for R4)
  bool strict = false;  // holds with at least one strict step
};

/// R1 stochastically increasing, R2 mean increasing, R3 positive quadrant
/// dependence, R4 positive covariance; `down` flips every inequality.
RelationCheck holds_relation(const Bivariate& dist, Relation relation, Direction direction, double tol = 1e-12);

struct LinkageProfile {
  bool w_indep_y = false;          // (a)
  bool w_indep_x = false;          // (b)
  bool w_indep_y_given_x = false;  // (c)
  bool w_indep_x_given_y = false;  // (d)
  bool doubly_linked = false;
};

LinkageProfile double_linkage(const FiniteJoint& joint, double tol = kDefaultTol);

struct AssocReversal {
  Relation relation = Relation::r3;
  bool reversal = false;
  /// Conditional direction when a reversal is found.
  std::optional<Direction> direction;
  std::vector<RelationCheck> conditional_up, conditional_down;  // per w level
  RelationCheck marginal_up, marginal_down;
};

AssocReversal detect_assoc_reversal(const FiniteJoint& joint, Relation relation, double tol = 1e-12);

struct LinearR4Report {
  double cov_yx = 0.0;  // β₁ Var(X) + β₂ Cov(X,W)
  double eta = 0.0;     // β₂ Cov(X,W)
  double var_y = 0.0;
  double marginal_slope = 0.0;  // Cov(Y,X)/Var(X)
  bool reversal = false;
  bool boundary = false;  // β₁ = 0: conditional association is flat
  /// |η| > |β₁| Var(X): the magnitude condition that matches cov_yx.
  bool magnitude_var_x = false;
  /// |η| > |β₁| Var(Y): recorded for comparison only.
  bool magnitude_var_y = false;
};

/// Association reversal for R4 under E(Y|X,W) = β₀ + β₁X + β₂W.
LinearR4Report linear_r4_reversal(double beta1, double beta2, double cov_xw, double var_x, double var_w,
                                  double var_eps);

}  // namespace simpcoll
