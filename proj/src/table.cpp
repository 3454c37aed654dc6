#include "simpcoll/table.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace simpcoll {

CategoricalScheme::CategoricalScheme(std::vector<Variable> variables) : vars_(std::move(variables)) {
  if (vars_.size() > static_cast<std::size_t>(VarSet::kMaxVariables))
    throw InputError("at most " + std::to_string(VarSet::kMaxVariables) + " variables are supported");
  std::set<std::string> names;
  for (const auto& v : vars_) {
    if (v.name.empty()) throw InputError("variable names must be nonempty");
    if (!names.insert(v.name).second) throw InputError("duplicate variable name '" + v.name + "'");
    if (v.levels.size() < 2) throw InputError("variable '" + v.name + "' needs at least 2 levels");
    std::set<std::string> labels(v.levels.begin(), v.levels.end());
    if (labels.size() != v.levels.size()) throw InputError("duplicate level label in variable '" + v.name + "'");
  }
}

Eigen::Index CategoricalScheme::cell_count(VarSet s) const {
  Eigen::Index n = 1;
  for (int j : s.members()) n *= levels(j);
  return n;
}

std::optional<int> CategoricalScheme::find(const std::string& name) const {
  for (int j = 0; j < size(); ++j)
    if (vars_[static_cast<std::size_t>(j)].name == name) return j;
  return std::nullopt;
}

int CategoricalScheme::index_of(const std::string& name) const {
  if (auto j = find(name)) return *j;
  throw InputError("unknown variable '" + name + "'");
}

Eigen::Index CategoricalScheme::level_index(int var, const std::string& label) const {
  const auto& levels = variable(var).levels;
  auto it = std::find(levels.begin(), levels.end(), label);
  if (it == levels.end()) throw InputError("variable '" + variable(var).name + "' has no level '" + label + "'");
  return static_cast<Eigen::Index>(it - levels.begin());
}

VarSet CategoricalScheme::parse_subset(std::span<const std::string> tokens) const {
  VarSet out;
  for (const auto& t : tokens) {
    if (auto j = find(t)) {
      out = out | VarSet::single(*j);
      continue;
    }
    const bool numeric = !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!numeric) throw InputError("unknown variable '" + t + "'");
    const int pos = std::stoi(t);
    if (pos < 1 || pos > size()) throw InputError("variable position " + t + " out of range");
    out = out | VarSet::single(pos - 1);
  }
  return out;
}

std::vector<std::string> CategoricalScheme::names(VarSet s) const {
  std::vector<std::string> out;
  for (int j : s.members()) out.push_back(variable(j).name);
  return out;
}

CategoricalScheme CategoricalScheme::restrict_to(VarSet s) const {
  std::vector<Variable> vars;
  for (int j : s.members()) vars.push_back(variable(j));
  return CategoricalScheme(std::move(vars));
}

std::vector<Eigen::Index> CategoricalScheme::unravel(Eigen::Index linear, VarSet s) const {
  const auto members = s.members();
  std::vector<Eigen::Index> digits(members.size());
  for (std::size_t k = members.size(); k-- > 0;) {
    const Eigen::Index m = levels(members[k]);
    digits[k] = linear % m;
    linear /= m;
  }
  return digits;
}

std::vector<Eigen::Index> projection_map(const CategoricalScheme& scheme, VarSet parent, VarSet child) {
  if (!child.subset_of(parent)) throw InputError("projection_map: child is not a subset of parent");
  const auto members = parent.members();
  const std::size_t r = members.size();
  // Stride of each parent member inside the child array (0 when not in child).
  std::vector<Eigen::Index> child_stride(r, 0), extent(r);
  Eigen::Index stride = 1;
  for (std::size_t k = r; k-- > 0;) {
    extent[k] = scheme.levels(members[k]);
    if (child.contains(members[k])) {
      child_stride[k] = stride;
      stride *= extent[k];
    }
  }
  const Eigen::Index count = scheme.cell_count(parent);
  std::vector<Eigen::Index> map(static_cast<std::size_t>(count));
  std::vector<Eigen::Index> digit(r, 0);
  Eigen::Index target = 0;
  for (Eigen::Index i = 0; i < count; ++i) {
    map[static_cast<std::size_t>(i)] = target;
    // odometer increment, last member fastest
    for (std::size_t k = r; k-- > 0;) {
      if (++digit[k] < extent[k]) {
        target += child_stride[k];
        break;
      }
      target -= child_stride[k] * (extent[k] - 1);
      digit[k] = 0;
    }
  }
  return map;
}

bool has_integral_cells(const ContingencyTable& table) {
  return (table.cells() == table.cells().floor()).all() && !table.is_probability();
}

ExactTable to_exact(const ContingencyTable& table) {
  if (table.is_probability()) {
    ArrayX<Rational> cells(table.cells().size());
    for (Eigen::Index i = 0; i < cells.size(); ++i) cells(i) = Rational(table.cells()(i));
    cells /= cells.sum();
    return ExactTable(table.scheme(), std::move(cells), TableForm::probability);
  }
  if (!has_integral_cells(table)) throw InputError("to_exact: counts table has non-integral cells");
  ArrayX<Rational> cells(table.cells().size());
  for (Eigen::Index i = 0; i < cells.size(); ++i) cells(i) = Rational(static_cast<long long>(table.cells()(i)));
  return ExactTable(table.scheme(), std::move(cells), TableForm::counts);
}

}  // namespace simpcoll
