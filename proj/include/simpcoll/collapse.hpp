#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "simpcoll/loglinear.hpp"
#include "simpcoll/table.hpp"

namespace simpcoll {

struct SubsetArray {
  VarSet vars;
  Eigen::ArrayXd values;
};

/// Collapsibility of τ_A onto the margin over B.
struct CollapseVerdict {
  VarSet target;  // A
  VarSet margin;  // B
  bool collapsible = false;
  Eigen::ArrayXd tau_full;      // τ_A^(n)
  Eigen::ArrayXd eta_marginal;  // η_A^(s)
  /// Σ_{Z⊆A} (-1)^{|A-Z|} d̃_Z(i_Z), over i_A.
  Eigen::ArrayXd residual;
  double max_residual = 0.0;
  double max_tau_eta_gap = 0.0;
  /// d(i_B) = l^(s)(i_B) - l̃_B^(n)(i_B).
  Eigen::ArrayXd d;
  /// d̃_Z and δ_Z = η_Z - τ_Z for every Z ⊆ A.
  std::vector<SubsetArray> d_tilde;
  std::vector<SubsetArray> delta;
};

/// Strict collapsibility over C for the partition A + B + C of the variables.
struct StrictCollapseVerdict {
  VarSet a, b, c;
  bool strict = false;
  /// τ_Z = 0 for all Z ⊇ A meeting C (the second clause of the definition, for A alone).
  bool definition_ii = false;
  CiVerdict ci;  // X_A ⊥ X_C | X_B
  /// Plain collapsibility onto A∪B for every L ⊆ A∪B with L∩A ≠ ∅.
  std::vector<CollapseVerdict> members;
  /// max |τ_Z| over Z meeting both A and C.
  double max_vanishing_tau = 0.0;
  /// max over members' residuals and the vanishing terms.
  double max_residual = 0.0;
};

CollapseVerdict check_collapsibility(const ContingencyTable& table, VarSet target, VarSet margin,
                                     double tol = kDefaultTauTol);

StrictCollapseVerdict check_strict_collapsibility(const ContingencyTable& table, VarSet a, VarSet b, VarSet c,
                                                  double tol = kDefaultTauTol);

}  // namespace simpcoll
