#include "simpcoll/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace simpcoll {

namespace {

std::vector<std::string> labels(const Eigen::VectorXd& v, const char* what) {
  if (v.size() < 2) throw InputError(std::string("support of ") + what + " needs at least 2 points");
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) throw InputError(std::string("non-finite support point for ") + what);
    if (i > 0 && !(v(i) > v(i - 1))) throw InputError(std::string("support of ") + what + " must be strictly increasing");
    std::ostringstream os;
    os.precision(17);
    os << v(i);
    out.push_back(os.str());
  }
  return out;
}

CategoricalScheme joint_scheme(const Eigen::VectorXd& y, const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  return CategoricalScheme({{"y", labels(y, "y")}, {"x", labels(x, "x")}, {"w", labels(w, "w")}});
}

Bivariate normalized(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::MatrixXd p) {
  p /= p.sum();
  return {std::move(y), std::move(x), std::move(p)};
}

// Weak monotonicity of a sequence; strict adds at least one step beyond tol.
RelationCheck monotone(const Eigen::VectorXd& seq, Direction dir, double tol) {
  RelationCheck r{true, false};
  for (Eigen::Index k = 1; k < seq.size(); ++k) {
    const double step = dir == Direction::up ? seq(k) - seq(k - 1) : seq(k - 1) - seq(k);
    if (step < -tol) r.holds = false;
    if (step > tol) r.strict = true;
  }
  r.strict = r.strict && r.holds;
  return r;
}

RelationCheck combine(const RelationCheck& a, const RelationCheck& b) {
  const bool holds = a.holds && b.holds;
  return {holds, holds && (a.strict || b.strict)};
}

}  // namespace

FiniteJoint::FiniteJoint(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::VectorXd w, std::span<const double> p)
    : FiniteJoint(y, x, w, build_table(joint_scheme(y, x, w), p, TableForm::probability)) {}

FiniteJoint::FiniteJoint(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::VectorXd w, ContingencyTable table)
    : y_(std::move(y)), x_(std::move(x)), w_(std::move(w)), table_(std::move(table)) {
  if (!table_.is_probability()) throw InputError("finite joint requires probabilities");
  if (table_.scheme() != joint_scheme(y_, x_, w_)) throw InputError("finite joint table does not match supports");
}

Bivariate marginal_yx(const FiniteJoint& joint) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(joint.y().size(), joint.x().size());
  for (Eigen::Index iy = 0; iy < p.rows(); ++iy)
    for (Eigen::Index ix = 0; ix < p.cols(); ++ix)
      for (Eigen::Index iw = 0; iw < joint.w().size(); ++iw) p(iy, ix) += joint.p(iy, ix, iw);
  return normalized(joint.y(), joint.x(), std::move(p));
}

Bivariate slice_yx(const FiniteJoint& joint, Eigen::Index iw) {
  Eigen::MatrixXd p(joint.y().size(), joint.x().size());
  for (Eigen::Index iy = 0; iy < p.rows(); ++iy)
    for (Eigen::Index ix = 0; ix < p.cols(); ++ix) p(iy, ix) = joint.p(iy, ix, iw);
  return normalized(joint.y(), joint.x(), std::move(p));
}

Bivariate transposed(const Bivariate& b) { return {b.x, b.y, b.p.transpose()}; }

Relation parse_relation(const std::string& s) {
  if (s == "R1" || s == "r1") return Relation::r1;
  if (s == "R2" || s == "r2") return Relation::r2;
  if (s == "R3" || s == "r3") return Relation::r3;
  if (s == "R4" || s == "r4") return Relation::r4;
  throw InputError("unknown relation '" + s + "' (expected R1..R4)");
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::r1: return "R1";
    case Relation::r2: return "R2";
    case Relation::r3: return "R3";
    case Relation::r4: return "R4";
  }
  return "?";
}

std::string to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

RelationCheck holds_relation(const Bivariate& dist, Relation relation, Direction direction, double tol) {
  const Eigen::Index ny = dist.p.rows(), nx = dist.p.cols();
  if ((relation == Relation::r1 || relation == Relation::r2) && nx < 2)
    throw InputError("R1/R2 need at least two X levels");
  const Eigen::RowVectorXd px = dist.p.colwise().sum();
  const Eigen::VectorXd py = dist.p.rowwise().sum();

  switch (relation) {
    case Relation::r1: {
      // P(Y > y | X = x) for every threshold y below the top level.
      RelationCheck r{true, false};
      for (Eigen::Index iy = 0; iy + 1 < ny; ++iy) {
        Eigen::VectorXd surv(nx);
        for (Eigen::Index ix = 0; ix < nx; ++ix) surv(ix) = dist.p.col(ix).tail(ny - iy - 1).sum() / px(ix);
        r = combine(r, monotone(surv, direction, tol));
      }
      return r;
    }
    case Relation::r2: {
      Eigen::VectorXd mean(nx);
      for (Eigen::Index ix = 0; ix < nx; ++ix) mean(ix) = dist.y.dot(dist.p.col(ix)) / px(ix);
      return monotone(mean, direction, tol);
    }
    case Relation::r3: {
      RelationCheck r{true, false};
      double fy = 0.0;
      for (Eigen::Index iy = 0; iy < ny; ++iy) {
        fy += py(iy);
        double fx = 0.0, fxy = 0.0;
        for (Eigen::Index ix = 0; ix < nx; ++ix) {
          fx += px(ix);
          fxy += dist.p.col(ix).head(iy + 1).sum();
          const double gap = direction == Direction::up ? fxy - fy * fx : fy * fx - fxy;
          if (gap < -tol) r.holds = false;
          if (gap > tol) r.strict = true;
        }
      }
      r.strict = r.strict && r.holds;
      return r;
    }
    case Relation::r4: {
      const double ey = dist.y.dot(py), ex = px.dot(dist.x);
      const double exy = dist.y.transpose() * dist.p * dist.x;
      const double cov = exy - ey * ex;
      const bool ok = direction == Direction::up ? cov > tol : cov < -tol;
      return {ok, ok};
    }
  }
  return {};
}

LinkageProfile double_linkage(const FiniteJoint& joint, double tol) {
  const auto& t = joint.table();
  const VarSet y = VarSet::single(FiniteJoint::kY), x = VarSet::single(FiniteJoint::kX),
               w = VarSet::single(FiniteJoint::kW);
  LinkageProfile lp;
  lp.w_indep_y = check_ci(t, w, y, VarSet{}, tol).holds;
  lp.w_indep_x = check_ci(t, w, x, VarSet{}, tol).holds;
  lp.w_indep_y_given_x = check_ci(t, w, y, x, tol).holds;
  lp.w_indep_x_given_y = check_ci(t, w, x, y, tol).holds;
  lp.doubly_linked = !(lp.w_indep_y || lp.w_indep_x || lp.w_indep_y_given_x || lp.w_indep_x_given_y);
  return lp;
}

AssocReversal detect_assoc_reversal(const FiniteJoint& joint, Relation relation, double tol) {
  AssocReversal rep;
  rep.relation = relation;
  bool all_up = true, all_down = true;
  for (Eigen::Index iw = 0; iw < joint.w().size(); ++iw) {
    const Bivariate slice = slice_yx(joint, iw);
    rep.conditional_up.push_back(holds_relation(slice, relation, Direction::up, tol));
    rep.conditional_down.push_back(holds_relation(slice, relation, Direction::down, tol));
    all_up = all_up && rep.conditional_up.back().strict;
    all_down = all_down && rep.conditional_down.back().strict;
  }
  const Bivariate marginal = marginal_yx(joint);
  rep.marginal_up = holds_relation(marginal, relation, Direction::up, tol);
  rep.marginal_down = holds_relation(marginal, relation, Direction::down, tol);
  if (all_up && rep.marginal_down.strict) {
    rep.reversal = true;
    rep.direction = Direction::up;
  } else if (all_down && rep.marginal_up.strict) {
    rep.reversal = true;
    rep.direction = Direction::down;
  }
  return rep;
}

LinearR4Report linear_r4_reversal(double beta1, double beta2, double cov_xw, double var_x, double var_w,
                                  double var_eps) {
  if (!(var_x > 0) || !(var_w > 0) || !(var_eps > 0)) throw InputError("variances must be positive");
  if (cov_xw * cov_xw > var_x * var_w * (1 + 1e-12)) throw InputError("Cov(X,W)^2 exceeds Var(X)Var(W)");
  LinearR4Report r;
  r.eta = beta2 * cov_xw;
  r.cov_yx = beta1 * var_x + r.eta;
  r.var_y = beta1 * beta1 * var_x + beta2 * beta2 * var_w + 2 * beta1 * beta2 * cov_xw + var_eps;
  r.marginal_slope = r.cov_yx / var_x;
  r.boundary = beta1 == 0.0;
  r.reversal = (beta1 < 0 && r.cov_yx > 0) || (beta1 > 0 && r.cov_yx < 0);
  r.magnitude_var_x = std::abs(r.eta) > std::abs(beta1) * var_x;
  r.magnitude_var_y = std::abs(r.eta) > std::abs(beta1) * r.var_y;
  return r;
}

}  // namespace simpcoll
