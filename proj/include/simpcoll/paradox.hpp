#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simpcoll/table.hpp"

namespace simpcoll {

/// A binary event "variable = level" (its complement is every other level).
struct EventSpec {
  std::string variable;
  std::string level;
};

template <class Scalar>
struct Stratum {
  std::string level;
  Scalar p_exposed;         // P(A | B, c)
  Scalar p_unexposed;       // P(A | B^c, c)
  Scalar weight_exposed;    // P(c | B)
  Scalar weight_unexposed;  // P(c | B^c)
  int direction = 0;        // sign of p_exposed - p_unexposed
};

template <class Scalar>
struct ParadoxReport {
  EventSpec response;
  EventSpec exposure;
  std::string covariate;
  std::vector<Stratum<Scalar>> strata;
  Scalar marginal_exposed;    // P(A | B)
  Scalar marginal_unexposed;  // P(A | B^c)
  int marginal_direction = 0;
  bool reversal = false;
  /// max |P(A|B') - Σ_c P(A|B',c) P(c|B')| over B' ∈ {B, B^c}.
  double mixture_residual = 0.0;
};

template <class Scalar>
struct BlythWeights {
  std::vector<std::string> levels;
  std::vector<Scalar> exposed;    // P(c | B)
  std::vector<Scalar> unexposed;  // P(c | B^c)
  double mixture_residual = 0.0;
};

template <class Scalar>
struct CornfieldDiagnostics {
  Scalar p_c_exposed;               // P(C|B)
  Scalar p_c_unexposed;             // P(C|B^c)
  Scalar p_a_exposed;               // P(A|B)
  Scalar p_a_unexposed;             // P(A|B^c)
  Scalar p_a_given_c;               // P(A|C)
  Scalar p_a_given_not_c;           // P(A|C^c)
  std::optional<Scalar> ratio_lhs;  // P(C|B) / P(C|B^c)
  std::optional<Scalar> ratio_rhs;  // P(A|B) / P(A|B^c)
  Scalar riskdiff_lhs;              // P(A|C) - P(A|C^c)
  Scalar riskdiff_rhs;              // P(A|B) - P(A|B^c)
  std::optional<bool> ratio_condition;  // unset when a ratio is undefined
  bool riskdiff_condition = false;
};

namespace detail {

/// counts[a][b][c]: a,b ∈ {0 = event, 1 = complement}, c over covariate levels.
template <class Scalar>
struct EventCube {
  std::vector<std::array<std::array<Scalar, 2>, 2>> cells;
  std::vector<std::string> levels;
};

template <class Scalar>
EventCube<Scalar> event_cube(const BasicTable<Scalar>& table, const EventSpec& response, const EventSpec& exposure,
                             int covariate, std::optional<Eigen::Index> covariate_level = std::nullopt) {
  const auto& scheme = table.scheme();
  const int r = scheme.index_of(response.variable);
  const int e = scheme.index_of(exposure.variable);
  if (r == e || r == covariate || e == covariate)
    throw InputError("response, exposure and covariate must be distinct variables");
  const Eigen::Index r_level = scheme.level_index(r, response.level);
  const Eigen::Index e_level = scheme.level_index(e, exposure.level);

  const auto to_r = projection_map(scheme, scheme.all(), VarSet::single(r));
  const auto to_e = projection_map(scheme, scheme.all(), VarSet::single(e));
  const auto to_c = projection_map(scheme, scheme.all(), VarSet::single(covariate));

  EventCube<Scalar> cube;
  const std::size_t k = covariate_level ? 2 : static_cast<std::size_t>(scheme.levels(covariate));
  cube.cells.assign(k, {{{Scalar(0), Scalar(0)}, {Scalar(0), Scalar(0)}}});
  if (covariate_level) {
    const auto& label = scheme.variable(covariate).levels[static_cast<std::size_t>(*covariate_level)];
    cube.levels = {label, "not " + label};
  } else {
    cube.levels = scheme.variable(covariate).levels;
  }
  for (Eigen::Index i = 0; i < table.cells().size(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const int a = to_r[u] == r_level ? 0 : 1;
    const int b = to_e[u] == e_level ? 0 : 1;
    std::size_t c = static_cast<std::size_t>(to_c[u]);
    if (covariate_level) c = to_c[u] == *covariate_level ? 0 : 1;
    cube.cells[c][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += table.cells()(i);
  }
  return cube;
}

template <class Scalar>
Scalar ratio(const Scalar& num, const Scalar& den, const std::string& what) {
  if (den == 0) throw InputError("zero-mass conditioning event: " + what);
  return num / den;
}

}  // namespace detail

template <class Scalar>
ParadoxReport<Scalar> detect_reversal(const BasicTable<Scalar>& table, const EventSpec& response,
                                      const EventSpec& exposure, const std::string& covariate) {
  const int cov = table.scheme().index_of(covariate);
  const auto cube = detail::event_cube(table, response, exposure, cov);

  ParadoxReport<Scalar> rep;
  rep.response = response;
  rep.exposure = exposure;
  rep.covariate = covariate;

  Scalar n_exposed(0), n_unexposed(0), a_exposed(0), a_unexposed(0);
  for (const auto& c : cube.cells) {
    n_exposed += c[0][0] + c[1][0];
    n_unexposed += c[0][1] + c[1][1];
    a_exposed += c[0][0];
    a_unexposed += c[0][1];
  }
  const std::string b_name = exposure.variable + "=" + exposure.level;
  rep.marginal_exposed = detail::ratio(a_exposed, n_exposed, b_name);
  rep.marginal_unexposed = detail::ratio(a_unexposed, n_unexposed, "not " + b_name);
  rep.marginal_direction = sign_of(Scalar(rep.marginal_exposed - rep.marginal_unexposed));

  Scalar mix_exposed(0), mix_unexposed(0);
  for (std::size_t k = 0; k < cube.cells.size(); ++k) {
    const auto& c = cube.cells[k];
    const std::string stratum = covariate + "=" + cube.levels[k];
    Stratum<Scalar> s;
    s.level = cube.levels[k];
    s.p_exposed = detail::ratio(c[0][0], Scalar(c[0][0] + c[1][0]), b_name + ", " + stratum);
    s.p_unexposed = detail::ratio(c[0][1], Scalar(c[0][1] + c[1][1]), "not " + b_name + ", " + stratum);
    s.weight_exposed = Scalar(c[0][0] + c[1][0]) / n_exposed;
    s.weight_unexposed = Scalar(c[0][1] + c[1][1]) / n_unexposed;
    s.direction = sign_of(Scalar(s.p_exposed - s.p_unexposed));
    mix_exposed += s.p_exposed * s.weight_exposed;
    mix_unexposed += s.p_unexposed * s.weight_unexposed;
    rep.strata.push_back(std::move(s));
  }
  rep.mixture_residual = std::max(to_double(abs_value(Scalar(mix_exposed - rep.marginal_exposed))),
                                  to_double(abs_value(Scalar(mix_unexposed - rep.marginal_unexposed))));

  const int d = rep.strata.front().direction;
  bool uniform = d != 0;
  for (const auto& s : rep.strata) uniform = uniform && s.direction == d;
  rep.reversal = uniform && rep.marginal_direction == -d;
  return rep;
}

template <class Scalar>
BlythWeights<Scalar> blyth_weights(const BasicTable<Scalar>& table, const EventSpec& response,
                                   const EventSpec& exposure, const std::string& covariate) {
  const auto rep = detect_reversal(table, response, exposure, covariate);
  BlythWeights<Scalar> w;
  for (const auto& s : rep.strata) {
    w.levels.push_back(s.level);
    w.exposed.push_back(s.weight_exposed);
    w.unexposed.push_back(s.weight_unexposed);
  }
  w.mixture_residual = rep.mixture_residual;
  return w;
}

/// Effect-size conditions for a binary confounder event C.
template <class Scalar>
CornfieldDiagnostics<Scalar> cornfield(const BasicTable<Scalar>& table, const EventSpec& response,
                                       const EventSpec& exposure, const EventSpec& confounder) {
  const auto& scheme = table.scheme();
  const int cov = scheme.index_of(confounder.variable);
  const auto cube = detail::event_cube(table, response, exposure, cov, scheme.level_index(cov, confounder.level));
  // cube.cells[c][a][b], c: 0 = C, 1 = C^c
  auto mass = [&](int a, int b, int c) {
    Scalar s(0);
    for (int ci = 0; ci < 2; ++ci)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          if ((a < 0 || a == ai) && (b < 0 || b == bi) && (c < 0 || c == ci))
            s += cube.cells[static_cast<std::size_t>(ci)][static_cast<std::size_t>(ai)][static_cast<std::size_t>(bi)];
    return s;
  };
  const Scalar p_a_b = detail::ratio(mass(0, 0, -1), mass(-1, 0, -1), "exposure");
  const Scalar p_a_nb = detail::ratio(mass(0, 1, -1), mass(-1, 1, -1), "exposure complement");
  const Scalar p_c_b = mass(-1, 0, 0) / mass(-1, 0, -1);
  const Scalar p_c_nb = mass(-1, 1, 0) / mass(-1, 1, -1);
  const Scalar p_a_c = detail::ratio(mass(0, -1, 0), mass(-1, -1, 0), "confounder");
  const Scalar p_a_nc = detail::ratio(mass(0, -1, 1), mass(-1, -1, 1), "confounder complement");

  CornfieldDiagnostics<Scalar> d;
  d.p_c_exposed = p_c_b;
  d.p_c_unexposed = p_c_nb;
  d.p_a_exposed = p_a_b;
  d.p_a_unexposed = p_a_nb;
  d.p_a_given_c = p_a_c;
  d.p_a_given_not_c = p_a_nc;
  if (p_c_nb != 0) d.ratio_lhs = p_c_b / p_c_nb;
  if (p_a_nb != 0) d.ratio_rhs = p_a_b / p_a_nb;
  if (d.ratio_lhs && d.ratio_rhs) d.ratio_condition = *d.ratio_lhs > *d.ratio_rhs;
  d.riskdiff_lhs = p_a_c - p_a_nc;
  d.riskdiff_rhs = p_a_b - p_a_nb;
  d.riskdiff_condition = d.riskdiff_lhs >= d.riskdiff_rhs;
  return d;
}

/// k/l < K/L and m/n < M/N but (k+m)/(l+n) > (K+M)/(L+N), in exact arithmetic.
bool fraction_reversal(std::int64_t k, std::int64_t l, std::int64_t K, std::int64_t L, std::int64_t m,
                       std::int64_t n, std::int64_t M, std::int64_t N);

template <class Scalar>
struct ScanEntry {
  std::string covariate;
  std::optional<ParadoxReport<Scalar>> report;
  std::string error;  // set when the candidate could not be evaluated
};

/// detect_reversal for every remaining variable as covariate, in variable order.
template <class Scalar>
std::vector<ScanEntry<Scalar>> scan_strata(const BasicTable<Scalar>& table, const EventSpec& response,
                                           const EventSpec& exposure) {
  const auto& scheme = table.scheme();
  if (scheme.size() < 3) throw InputError("scan_strata needs at least three variables");
  const int r = scheme.index_of(response.variable);
  const int e = scheme.index_of(exposure.variable);
  // Bad event levels are a usage problem, not a per-candidate failure.
  scheme.level_index(r, response.level);
  scheme.level_index(e, exposure.level);
  if (r == e) throw InputError("response and exposure must be distinct variables");
  std::vector<ScanEntry<Scalar>> out;
  for (int j = 0; j < scheme.size(); ++j) {
    if (j == r || j == e) continue;
    ScanEntry<Scalar> entry;
    entry.covariate = scheme.variable(j).name;
    try {
      entry.report = detect_reversal(table, response, exposure, entry.covariate);
    } catch (const InputError& err) {
      entry.error = err.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace simpcoll
