#include "simpcoll/loglinear.hpp"

#include <cmath>

namespace simpcoll {

namespace {

constexpr int kMaxDecomposeVariables = 20;

void require_probability(const ContingencyTable& table) {
  if (!table.is_probability()) throw InputError("log-linear decomposition requires a probability table");
}

Eigen::ArrayXd mobius(const CategoricalScheme& scheme, const std::vector<Eigen::ArrayXd>& tl, VarSet a) {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(scheme.cell_count(a));
  for (VarSet z : a.subsets()) out += mobius_sign(a, z) * broadcast(scheme, tl[z.mask()], z, a);
  return out;
}

}  // namespace

InteractionDecomposition::InteractionDecomposition(CategoricalScheme scheme, std::vector<Eigen::ArrayXd> tau)
    : scheme_(std::move(scheme)), tau_(std::move(tau)) {
  if (tau_.size() != (std::size_t{1} << scheme_.size()))
    throw InputError("decomposition needs one term per subset");
}

Eigen::ArrayXd InteractionDecomposition::forward_sum(VarSet a) const {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(scheme_.cell_count(a));
  for (VarSet z : a.subsets()) out += broadcast(scheme_, tau(z), z, a);
  return out;
}

Eigen::ArrayXd tilde_l(const CategoricalScheme& scheme, const Eigen::ArrayXd& log_cells, VarSet a) {
  const double complement = static_cast<double>(scheme.cell_count(scheme.all() - a));
  return sum_onto(scheme, log_cells, scheme.all(), a) / complement;
}

Eigen::ArrayXd tilde_l(const ContingencyTable& table, VarSet a) {
  require_probability(table);
  return tilde_l(table.scheme(), table.cells().log(), a);
}

Eigen::ArrayXd interaction(const ContingencyTable& table, VarSet a) {
  require_probability(table);
  const auto& scheme = table.scheme();
  const Eigen::ArrayXd log_cells = table.cells().log();
  std::vector<Eigen::ArrayXd> tl(std::size_t{1} << scheme.size());
  for (VarSet z : a.subsets()) tl[z.mask()] = tilde_l(scheme, log_cells, z);
  return mobius(scheme, tl, a);
}

InteractionDecomposition decompose_log_cells(const CategoricalScheme& scheme, const Eigen::ArrayXd& log_cells) {
  if (scheme.size() > kMaxDecomposeVariables) throw InputError("too many variables for subset enumeration");
  const VarSet all = scheme.all();
  std::vector<Eigen::ArrayXd> tl(std::size_t{1} << scheme.size());
  for (VarSet z : all.subsets()) tl[z.mask()] = tilde_l(scheme, log_cells, z);
  std::vector<Eigen::ArrayXd> tau(tl.size());
  for (VarSet a : all.subsets()) tau[a.mask()] = mobius(scheme, tl, a);
  return InteractionDecomposition(scheme, std::move(tau));
}

InteractionDecomposition decompose(const ContingencyTable& table) {
  require_probability(table);
  return decompose_log_cells(table.scheme(), table.cells().log());
}

HierarchyCheck is_hierarchical(const InteractionDecomposition& dec, double tol) {
  HierarchyCheck check;
  for (VarSet b : dec.scheme().all().subsets()) {
    if (dec.max_abs(b) <= tol) continue;
    for (VarSet a : b.subsets()) {
      if (a == b || dec.max_abs(a) > tol) continue;
      check.hierarchical = false;
      check.violations.push_back({b, a});
    }
  }
  return check;
}

}  // namespace simpcoll
