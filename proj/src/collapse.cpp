#include "simpcoll/collapse.hpp"

#include <cmath>
#include <string>

namespace simpcoll {

namespace {

CollapseVerdict collapse_with(const ContingencyTable& table, const InteractionDecomposition& full, VarSet target,
                              VarSet margin, double tol) {
  const auto& scheme = table.scheme();
  const ContingencyTable marginal = marginalize(table, margin);
  const InteractionDecomposition reduced = decompose(marginal);
  const CategoricalScheme& mscheme = marginal.scheme();

  CollapseVerdict v;
  v.target = target;
  v.margin = margin;

  // Route 1: residual of the d/d̃ construction. Arrays over subsets of B have
  // the same layout in the full and the marginal scheme.
  const Eigen::ArrayXd l_s = marginal.cells().log();
  v.d = l_s - tilde_l(table, margin);
  const VarSet target_rel = target.relative_to(margin);
  v.residual = Eigen::ArrayXd::Zero(scheme.cell_count(target));
  for (VarSet z : target.subsets()) {
    const VarSet z_rel = z.relative_to(margin);
    Eigen::ArrayXd dz = sum_onto(mscheme, v.d, mscheme.all(), z_rel) /
                        static_cast<double>(mscheme.cell_count(mscheme.all() - z_rel));
    v.residual += mobius_sign(target, z) * broadcast(mscheme, dz, z_rel, target_rel);
    v.d_tilde.push_back({z, std::move(dz)});
    v.delta.push_back({z, reduced.tau(z_rel) - full.tau(z)});
  }
  v.max_residual = v.residual.abs().maxCoeff();

  // Route 2: direct comparison of the full and marginal interaction terms.
  v.tau_full = full.tau(target);
  v.eta_marginal = reduced.tau(target_rel);
  v.max_tau_eta_gap = (v.tau_full - v.eta_marginal).abs().maxCoeff();

  const bool by_residual = v.max_residual <= tol;
  const bool by_terms = v.max_tau_eta_gap <= tol;
  if (by_residual != by_terms)
    throw ConsistencyError("collapsibility routes disagree: residual " + std::to_string(v.max_residual) +
                           " vs term gap " + std::to_string(v.max_tau_eta_gap));
  v.collapsible = by_residual;
  return v;
}

void require_probability(const ContingencyTable& table) {
  if (!table.is_probability()) throw InputError("collapsibility checks require a probability table");
}

}  // namespace

CollapseVerdict check_collapsibility(const ContingencyTable& table, VarSet target, VarSet margin, double tol) {
  require_probability(table);
  const VarSet all = table.scheme().all();
  if (!margin.subset_of(all) || !target.subset_of(all)) throw InputError("unknown variable in subset");
  if (!target.subset_of(margin)) throw InputError("target subset must lie inside the margin");
  if (margin.empty()) throw InputError("margin must be nonempty");
  // τ_∅ is the normalizing constant of ln p and always changes under marginalization
  if (target.empty()) throw InputError("target subset must be nonempty");
  if (margin == all) throw InputError("margin is the full variable set; nothing to collapse over");
  return collapse_with(table, decompose(table), target, margin, tol);
}

StrictCollapseVerdict check_strict_collapsibility(const ContingencyTable& table, VarSet a, VarSet b, VarSet c,
                                                  double tol) {
  require_probability(table);
  const VarSet all = table.scheme().all();
  if (a.intersects(b) || a.intersects(c) || b.intersects(c) || (a | b | c) != all)
    throw InputError("A, B, C must partition the variable set");
  if (a.empty() || c.empty()) throw InputError("A and C must be nonempty");

  const InteractionDecomposition full = decompose(table);
  StrictCollapseVerdict v;
  v.a = a;
  v.b = b;
  v.c = c;

  // Route 1: conditional independence.
  v.ci = check_ci(table, a, c, b, tol);

  // Route 2: every τ_L (L∩A ≠ ∅) collapsible onto A∪B, and every τ_Z meeting A and C vanishes.
  const VarSet margin = a | b;
  bool members_ok = true;
  for (VarSet l : margin.subsets()) {
    if (!l.intersects(a)) continue;
    v.members.push_back(collapse_with(table, full, l, margin, tol));
    members_ok = members_ok && v.members.back().collapsible;
    v.max_residual = std::max(v.max_residual, v.members.back().max_residual);
  }
  double max_def_ii = 0.0;
  for (VarSet z : all.subsets()) {
    if (!z.intersects(a) || !z.intersects(c)) continue;
    v.max_vanishing_tau = std::max(v.max_vanishing_tau, full.max_abs(z));
    if (a.subset_of(z)) max_def_ii = std::max(max_def_ii, full.max_abs(z));
  }
  v.max_residual = std::max(v.max_residual, v.max_vanishing_tau);
  v.definition_ii = max_def_ii <= tol;
  const bool by_terms = members_ok && v.max_vanishing_tau <= tol;

  if (by_terms != v.ci.holds)
    throw ConsistencyError("strict collapsibility routes disagree: CI deviation " +
                           std::to_string(v.ci.max_deviation) + ", term residual " + std::to_string(v.max_residual));
  v.strict = v.ci.holds;
  return v;
}

}  // namespace simpcoll
