#pragma once

#include <vector>

#include <Eigen/Core>

#include "simpcoll/table.hpp"

namespace simpcoll {

/// Threshold below which an interaction term counts as zero.
inline constexpr double kDefaultTauTol = 1e-8;

/// Saturated log-linear decomposition: ln p(i) = Σ_{Z ⊆ all} τ_Z(i_Z).
///
/// Terms are stored for every subset of the variables (including ∅, the
/// grand mean of the log cells), each as a row-major array over i_Z.
class InteractionDecomposition {
 public:
  InteractionDecomposition(CategoricalScheme scheme, std::vector<Eigen::ArrayXd> tau);

  const CategoricalScheme& scheme() const { return scheme_; }
  const Eigen::ArrayXd& tau(VarSet z) const { return tau_.at(z.mask()); }
  double max_abs(VarSet z) const { return tau(z).abs().maxCoeff(); }

  /// Σ_{Z ⊆ A} τ_Z(i_Z) as an array over i_A; equals l̃_A for a valid decomposition.
  Eigen::ArrayXd forward_sum(VarSet a) const;

 private:
  CategoricalScheme scheme_;
  std::vector<Eigen::ArrayXd> tau_;
};

/// Mean of ln p(i) over the coordinates outside A, at each i_A.
Eigen::ArrayXd tilde_l(const ContingencyTable& table, VarSet a);
/// l̃_A computed from arbitrary log-cell values over the full scheme.
Eigen::ArrayXd tilde_l(const CategoricalScheme& scheme, const Eigen::ArrayXd& log_cells, VarSet a);

/// τ_A(i_A) = Σ_{Z ⊆ A} (-1)^{|A-Z|} l̃_Z(i_Z).
Eigen::ArrayXd interaction(const ContingencyTable& table, VarSet a);

InteractionDecomposition decompose(const ContingencyTable& table);
/// Decomposition of arbitrary log-cells (no positivity/unit-sum requirement).
InteractionDecomposition decompose_log_cells(const CategoricalScheme& scheme, const Eigen::ArrayXd& log_cells);

struct HierarchyViolation {
  VarSet nonzero;  // B with τ_B ≠ 0
  VarSet zero;     // A ⊂ B with τ_A = 0
};

struct HierarchyCheck {
  bool hierarchical = true;
  std::vector<HierarchyViolation> violations;
};

HierarchyCheck is_hierarchical(const InteractionDecomposition& dec, double tol = kDefaultTauTol);

}  // namespace simpcoll
