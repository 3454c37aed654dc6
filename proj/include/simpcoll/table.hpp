#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "simpcoll/errors.hpp"
#include "simpcoll/scalar.hpp"
#include "simpcoll/varset.hpp"

namespace simpcoll {

/// Absolute tolerance for checks on exact distributions.
inline constexpr double kDefaultTol = 1e-9;
/// Allowed deviation of a probability table's total from 1.
inline constexpr double kUnitSumTol = 1e-12;

struct Variable {
  std::string name;
  std::vector<std::string> levels;

  bool operator==(const Variable&) const = default;
};

/// Ordered categorical variables; level order is ingestion order.
class CategoricalScheme {
 public:
  CategoricalScheme() = default;
  explicit CategoricalScheme(std::vector<Variable> variables);

  int size() const { return static_cast<int>(vars_.size()); }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  const std::vector<Variable>& variables() const { return vars_; }
  Eigen::Index levels(int j) const { return static_cast<Eigen::Index>(variable(j).levels.size()); }
  VarSet all() const { return VarSet::full(size()); }

  /// ∏_{j∈S} m_j.
  Eigen::Index cell_count(VarSet s) const;
  Eigen::Index cell_count() const { return cell_count(all()); }

  std::optional<int> find(const std::string& name) const;
  int index_of(const std::string& name) const;
  Eigen::Index level_index(int var, const std::string& label) const;

  /// Names or 1-based positions, e.g. {"A","X"} or {"1","2"}.
  VarSet parse_subset(std::span<const std::string> tokens) const;
  std::vector<std::string> names(VarSet s) const;

  /// Scheme over the members of `s`, in ascending variable order.
  CategoricalScheme restrict_to(VarSet s) const;

  /// Digits of a row-major linear index over the variables of `s`.
  std::vector<Eigen::Index> unravel(Eigen::Index linear, VarSet s) const;

  bool operator==(const CategoricalScheme&) const = default;

 private:
  std::vector<Variable> vars_;
};

/// For every cell of the array over i_parent, the linear index of its
/// projection onto i_child (child ⊆ parent). Arrays over a subset are
/// row-major with the last member varying fastest.
std::vector<Eigen::Index> projection_map(const CategoricalScheme& scheme, VarSet parent, VarSet child);

/// Expand an array over i_child to the array over i_parent by broadcasting.
template <class Scalar>
ArrayX<Scalar> broadcast(const CategoricalScheme& scheme, const ArrayX<Scalar>& child_values, VarSet child,
                         VarSet parent) {
  const auto map = projection_map(scheme, parent, child);
  ArrayX<Scalar> out(static_cast<Eigen::Index>(map.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = child_values(map[static_cast<std::size_t>(i)]);
  return out;
}

/// Sum an array over i_parent down to i_child.
template <class Scalar>
ArrayX<Scalar> sum_onto(const CategoricalScheme& scheme, const ArrayX<Scalar>& parent_values, VarSet parent,
                        VarSet child) {
  const auto map = projection_map(scheme, parent, child);
  ArrayX<Scalar> out = ArrayX<Scalar>::Constant(scheme.cell_count(child), Scalar(0));
  for (Eigen::Index i = 0; i < parent_values.size(); ++i) out(map[static_cast<std::size_t>(i)]) += parent_values(i);
  return out;
}

enum class TableForm { counts, probability };

/// n-dimensional table of nonnegative cells over a categorical scheme.
template <class Scalar>
class BasicTable {
 public:
  using Cells = ArrayX<Scalar>;

  BasicTable(CategoricalScheme scheme, Cells cells, TableForm form)
      : scheme_(std::move(scheme)), cells_(std::move(cells)), form_(form) {
    validate();
  }

  const CategoricalScheme& scheme() const { return scheme_; }
  const Cells& cells() const { return cells_; }
  TableForm form() const { return form_; }
  bool is_probability() const { return form_ == TableForm::probability; }
  Scalar total() const { return cells_.sum(); }
  int dimension() const { return scheme_.size(); }

 private:
  void validate() const {
    if (scheme_.size() == 0) throw InputError("table needs at least one variable");
    if (cells_.size() != scheme_.cell_count())
      throw InputError("dimension mismatch: expected " + std::to_string(scheme_.cell_count()) + " cells, got " +
                       std::to_string(cells_.size()));
    for (Eigen::Index i = 0; i < cells_.size(); ++i) {
      if constexpr (std::is_same_v<Scalar, double>) {
        if (!std::isfinite(cells_(i))) throw InputError("non-finite cell at index " + std::to_string(i));
      }
      if (cells_(i) < 0) throw InputError("negative cell at index " + std::to_string(i));
      if (form_ == TableForm::probability && cells_(i) == 0)
        throw InputError("zero cell at index " + std::to_string(i) + " in probability table");
    }
    if (form_ == TableForm::probability) {
      const double dev = to_double(abs_value(Scalar(total() - Scalar(1))));
      if (dev > kUnitSumTol) throw InputError("probability cells sum to 1 only within " + std::to_string(dev));
    }
  }

  CategoricalScheme scheme_;
  Cells cells_;
  TableForm form_;
};

using ContingencyTable = BasicTable<double>;
using ExactTable = BasicTable<Rational>;

template <class Scalar>
BasicTable<Scalar> build_table(CategoricalScheme scheme, ArrayX<Scalar> cells, TableForm form) {
  return BasicTable<Scalar>(std::move(scheme), std::move(cells), form);
}

inline ContingencyTable build_table(CategoricalScheme scheme, std::span<const double> cells, TableForm form) {
  ArrayX<double> a = Eigen::Map<const ArrayX<double>>(cells.data(), static_cast<Eigen::Index>(cells.size()));
  return ContingencyTable(std::move(scheme), std::move(a), form);
}

/// Exact copy of an integral-count table; throws if any cell is not an integer.
ExactTable to_exact(const ContingencyTable& table);
bool has_integral_cells(const ContingencyTable& table);

/// Counts → probabilities. With `smoothing` = λ > 0, cell ← (c + λ)/(total + λ·#cells).
template <class Scalar>
BasicTable<Scalar> normalize(const BasicTable<Scalar>& table, std::optional<Scalar> smoothing = std::nullopt) {
  if (table.is_probability()) return table;
  ArrayX<Scalar> cells = table.cells();
  if (smoothing) {
    if (*smoothing <= 0) throw InputError("smoothing must be positive");
    cells += *smoothing;
  }
  const Scalar total = cells.sum();
  if (total == 0) throw InputError("zero total; cannot normalize");
  for (Eigen::Index i = 0; i < cells.size(); ++i)
    if (cells(i) == 0) throw InputError("zero cell at index " + std::to_string(i) + " (enable smoothing)");
  cells /= total;
  return BasicTable<Scalar>(table.scheme(), std::move(cells), TableForm::probability);
}

/// p_B(i_B) = Σ over the complement of B.
template <class Scalar>
BasicTable<Scalar> marginalize(const BasicTable<Scalar>& table, VarSet keep) {
  const auto& scheme = table.scheme();
  if (keep.empty()) throw InputError("marginalize: empty variable subset");
  if (!keep.subset_of(scheme.all())) throw InputError("marginalize: unknown variable in subset");
  if (keep == scheme.all()) return table;
  ArrayX<Scalar> cells = sum_onto(scheme, table.cells(), scheme.all(), keep);
  return BasicTable<Scalar>(scheme.restrict_to(keep), std::move(cells), table.form());
}

/// Slice at `var = level`, dropping `var`; probability tables are renormalized.
template <class Scalar>
BasicTable<Scalar> condition_on(const BasicTable<Scalar>& table, int var, Eigen::Index level) {
  const auto& scheme = table.scheme();
  if (var < 0 || var >= scheme.size()) throw InputError("condition_on: unknown variable");
  if (scheme.size() < 2) throw InputError("condition_on: cannot condition a one-variable table");
  if (level < 0 || level >= scheme.levels(var)) throw InputError("condition_on: level out of range");
  const VarSet rest = scheme.all() - VarSet::single(var);
  const auto to_var = projection_map(scheme, scheme.all(), VarSet::single(var));
  const auto to_rest = projection_map(scheme, scheme.all(), rest);
  ArrayX<Scalar> cells = ArrayX<Scalar>::Constant(scheme.cell_count(rest), Scalar(0));
  for (Eigen::Index i = 0; i < table.cells().size(); ++i)
    if (to_var[static_cast<std::size_t>(i)] == level) cells(to_rest[static_cast<std::size_t>(i)]) = table.cells()(i);
  const Scalar mass = cells.sum();
  if (mass == 0) throw InputError("condition_on: zero-mass slice " + scheme.variable(var).name + "=" +
                                  scheme.variable(var).levels[static_cast<std::size_t>(level)]);
  if (table.is_probability()) cells /= mass;
  return BasicTable<Scalar>(scheme.restrict_to(rest), std::move(cells), table.form());
}

template <class Scalar>
BasicTable<Scalar> condition_on(const BasicTable<Scalar>& table, const std::string& var, const std::string& level) {
  const int j = table.scheme().index_of(var);
  return condition_on(table, j, table.scheme().level_index(j, level));
}

struct CiVerdict {
  bool holds = false;
  double max_deviation = 0.0;
  VarSet witness_vars;
  /// Level indices of the witness cell over `witness_vars`, ascending variable order.
  std::vector<Eigen::Index> witness;
};

/// Exact test of X_A ⊥ X_C | X_B: max over cells of |p(a,c|b) - p(a|b)p(c|b)|.
template <class Scalar>
CiVerdict check_ci(const BasicTable<Scalar>& table, VarSet a, VarSet c, VarSet b, double tol = kDefaultTol) {
  const auto& scheme = table.scheme();
  if (!table.is_probability()) throw InputError("check_ci requires a probability table");
  if (a.empty() || c.empty()) throw InputError("check_ci: A and C must be nonempty");
  if (a.intersects(c) || a.intersects(b) || b.intersects(c)) throw InputError("check_ci: subsets overlap");
  const VarSet s = a | b | c;
  if (!s.subset_of(scheme.all())) throw InputError("check_ci: unknown variable in subset");

  const ArrayX<Scalar> joint = sum_onto(scheme, table.cells(), scheme.all(), s);
  const ArrayX<Scalar> p_ab = sum_onto(scheme, joint, s, a | b);
  const ArrayX<Scalar> p_cb = sum_onto(scheme, joint, s, c | b);
  const auto to_ab = projection_map(scheme, s, a | b);
  const auto to_cb = projection_map(scheme, s, c | b);
  ArrayX<Scalar> p_b;
  std::vector<Eigen::Index> to_b;
  if (!b.empty()) {
    p_b = sum_onto(scheme, joint, s, b);
    to_b = projection_map(scheme, s, b);
  }

  CiVerdict verdict;
  verdict.witness_vars = s;
  Eigen::Index worst = 0;
  double worst_dev = -1.0;
  for (Eigen::Index i = 0; i < joint.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Scalar pb = b.empty() ? Scalar(table.total()) : p_b(to_b[k]);
    const Scalar lhs = joint(i) / pb;
    const Scalar rhs = (p_ab(to_ab[k]) / pb) * (p_cb(to_cb[k]) / pb);
    const double dev = to_double(abs_value(Scalar(lhs - rhs)));
    if (dev > worst_dev) {
      worst_dev = dev;
      worst = i;
    }
  }
  verdict.max_deviation = worst_dev;
  verdict.holds = worst_dev <= tol;
  verdict.witness = scheme.unravel(worst, s);
  return verdict;
}

}  // namespace simpcoll
