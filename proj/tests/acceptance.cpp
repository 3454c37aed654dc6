// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "simpcoll/cli.hpp"
#include "simpcoll/collapse.hpp"
#include "simpcoll/depfun.hpp"
#include "simpcoll/paradox.hpp"
#include "simpcoll/survival.hpp"
#include "support.hpp"

using namespace simpcoll;
namespace st = simpcoll::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double time_limit;  // seconds; 0 means none
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Rational exact(const json& scalar) {
  const auto s = scalar.at("exact").get<std::string>();
  const auto slash = s.find('/');
  return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

std::pair<int, json> run_cli(const std::vector<std::string>& args) {
  std::ostringstream os;
  const int code = cli::run(args, os);
  return {code, json::parse(os.str())};
}

Outcome example1() {
  const auto [code, rep] =
      run_cli({"scan-paradox", "--response", "A=Y", "--exposure", "X=M", st::fixture("berkeley.csv")});
  const auto& r = rep.at("result").at("candidates").at(0).at("report");
  const auto& s = r.at("strata");
  const bool ok = code == 2 && rep.at("result").at("exact") == true && r.at("reversal") == true &&
                  exact(s[0].at("p_exposed")) == Rational(1, 5) && exact(s[0].at("p_unexposed")) == Rational(2, 8) &&
                  exact(s[1].at("p_exposed")) == Rational(6, 8) && exact(s[1].at("p_unexposed")) == Rational(4, 5) &&
                  exact(r.at("marginal_exposed")) == Rational(7, 13) &&
                  exact(r.at("marginal_unexposed")) == Rational(6, 13) &&
                  exact(s[0].at("weight_exposed")) == Rational(5, 13) &&
                  exact(s[1].at("weight_exposed")) == Rational(8, 13);
  return {ok, "strata 1/5<1/4, 3/4<4/5; marginal 7/13>6/13; weights 5/13, 8/13; exit " + std::to_string(code)};
}

Outcome example2() {
  const auto [code, rep] = run_cli({"scan-paradox", "--response", "death=Y", "--exposure", "accused=W",
                                    "--confounder", "victim=W", st::fixture("death_penalty.csv")});
  const auto& r = rep.at("result").at("candidates").at(0).at("report");
  const auto& s = r.at("strata");
  const auto& c = r.at("cornfield");
  const bool exact_ok =
      code == 2 && r.at("reversal") == true && exact(r.at("marginal_exposed")) == Rational(19, 160) &&
      exact(r.at("marginal_unexposed")) == Rational(17, 166) && exact(s[0].at("p_exposed")) == Rational(19, 151) &&
      exact(s[0].at("p_unexposed")) == Rational(11, 63) && exact(s[1].at("p_exposed")) == 0 &&
      exact(s[1].at("p_unexposed")) == Rational(6, 103) && exact(c.at("p_c_exposed")) == Rational(151, 160) &&
      exact(c.at("p_c_unexposed")) == Rational(63, 166) && c.at("ratio_condition") == true;
  const std::pair<json, double> rounded[] = {
      {r.at("marginal_exposed"), 0.12},  {r.at("marginal_unexposed"), 0.10}, {s[0].at("p_exposed"), 0.126},
      {s[0].at("p_unexposed"), 0.175}, {c.at("p_c_exposed"), 0.94},         {c.at("p_c_unexposed"), 0.38}};
  double worst = 0;
  for (const auto& [v, paper] : rounded) worst = std::max(worst, std::abs(v.at("value").get<double>() - paper));
  return {exact_ok && worst <= 5e-3, "exact rationals match; max gap to rounded values " + fmt("%.2e", worst)};
}

Outcome remark2() {
  const bool named = fraction_reversal(1, 6, 2, 9, 5, 7, 3, 4);
  const bool named_exact = Rational(1, 6) < Rational(2, 9) && Rational(5, 7) < Rational(3, 4) &&
                           Rational(6, 13) > Rational(5, 13);
  struct Frac {
    std::int64_t k, l;
  };
  std::vector<Frac> fr;
  for (std::int64_t l = 1; l <= 9; ++l)
    for (std::int64_t k = 0; k <= l; ++k) fr.push_back({k, l});
  const std::size_t n = fr.size();
  std::vector<Rational> value(n), mediant(n * n);
  for (std::size_t i = 0; i < n; ++i) value[i] = Rational(fr[i].k, fr[i].l);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mediant[i * n + j] = Rational(fr[i].k + fr[j].k, fr[i].l + fr[j].l);
  std::vector<char> less(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) less[i * n + j] = value[i] < value[j];
  std::size_t tuples = 0, mismatches = 0, reversals = 0;
  // (k/l, K/L) is the first comparison, (m/n, M/N) the second
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          ++tuples;
          const bool oracle = less[a * n + b] && less[c * n + d] && mediant[a * n + c] > mediant[b * n + d];
          const bool ours = fraction_reversal(fr[a].k, fr[a].l, fr[b].k, fr[b].l, fr[c].k, fr[c].l, fr[d].k, fr[d].l);
          mismatches += oracle != ours;
          reversals += ours;
        }
  return {named && named_exact && mismatches == 0,
          "(1,6,2,9,5,7,3,4) reversal; " + std::to_string(tuples) + " tuples, " + std::to_string(reversals) +
              " reversals, " + std::to_string(mismatches) + " mismatches"};
}

Outcome mobius() {
  std::mt19937_64 rng(2501);
  double worst_rt = 0, worst_l = 0, worst_c = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = st::random_scheme(rng, 4, 4);
    const auto t = st::random_probability_table(rng, s);
    const auto dec = decompose(t);
    worst_rt = std::max(worst_rt, (dec.forward_sum(s.all()) - t.cells().log()).abs().maxCoeff());
    for (VarSet a : s.all().subsets()) {
      worst_l = std::max(worst_l, (dec.forward_sum(a) - tilde_l(t, a)).abs().maxCoeff());
      if (!a.empty()) worst_c = std::max(worst_c, st::max_centering(s, dec.tau(a), a));
    }
  }
  return {worst_rt <= 1e-9 && worst_l <= 1e-9 && worst_c <= 1e-9,
          "max |ln p - sum| " + fmt("%.1e", worst_rt) + ", max |l~_A - sum| " + fmt("%.1e", worst_l) +
              ", max centering " + fmt("%.1e", worst_c)};
}

// Random partition A + B + C of the variables with A and C nonempty.
void random_partition(std::mt19937_64& rng, int n, VarSet& a, VarSet& b, VarSet& c) {
  std::uniform_int_distribution<int> pick(0, 2);
  do {
    a = b = c = VarSet{};
    for (int j = 0; j < n; ++j) {
      const int r = pick(rng);
      (r == 0 ? a : r == 1 ? b : c) = (r == 0 ? a : r == 1 ? b : c) | VarSet::single(j);
    }
  } while (a.empty() || c.empty());
}

Outcome theorem2() {
  std::mt19937_64 rng(2502);
  int disagreements = 0, collapsible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = st::random_scheme(rng, 4, 3, 2);
    VarSet a, b, c;
    random_partition(rng, s.size(), a, b, c);
    const auto t = trial % 2 ? st::random_probability_table(rng, s) : st::ci_table(rng, s, a, b, c);
    const VarSet margin = a | b;
    std::vector<VarSet> targets;
    for (VarSet l : margin.subsets())
      if (l.intersects(a)) targets.push_back(l);
    const VarSet target = targets[std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng)];
    try {
      const auto v = check_collapsibility(t, target, margin, 1e-8);
      disagreements += (v.max_residual <= 1e-8) != (v.max_tau_eta_gap <= 1e-8);
      collapsible += v.collapsible;
    } catch (const ConsistencyError&) {
      ++disagreements;
    }
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements over 500 tables (" +
                                  std::to_string(collapsible) + " collapsible)"};
}

Outcome theorem3() {
  std::mt19937_64 rng(2503);
  int errors = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = st::random_scheme(rng, 4, 3, 2);
    VarSet a, b, c;
    random_partition(rng, s.size(), a, b, c);
    const auto t = st::ci_table(rng, s, a, b, c);
    if (!check_strict_collapsibility(t, a, b, c).strict) ++errors;
    Eigen::ArrayXd cells = t.cells();
    cells(std::uniform_int_distribution<Eigen::Index>(0, cells.size() - 1)(rng)) += 0.01;
    cells /= cells.sum();
    if (check_strict_collapsibility(ContingencyTable(s, cells, TableForm::probability), a, b, c).strict) ++errors;
  }
  return {errors == 0, std::to_string(errors) + " errors over 100 constructions and their perturbations"};
}

Outcome regression() {
  std::mt19937_64 rng(2504);
  int wrong = 0, route_errors = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto m = st::random_levels(rng, 2 + trial % 4, true);
    const bool build = trial % 2 == 0;
    if (build) st::set_cov_alpha_mux(m, 0.0);
    try {
      const StratifiedRegressionSummary s(m);
      const auto v = check_parallel_collapsibility(s, 1e-9);
      wrong += v.collapsible != build || v.collapsible != (v.gap <= 1e-9);
    } catch (const ConsistencyError&) {
      ++route_errors;
    }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    auto m = st::random_levels(rng, 2 + trial % 4, false);
    const bool build = trial % 2 == 0;
    if (build) st::make_a_collapsible(m);
    try {
      const auto v = check_a_collapsibility(StratifiedRegressionSummary(m), 1e-9);
      wrong += v.a_collapsible != build || v.a_collapsible != (v.gap <= 1e-9);
    } catch (const ConsistencyError&) {
      ++route_errors;
    }
  }
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const StratifiedRegressionSummary s(st::random_levels(rng, 2 + trial % 4, trial % 2 == 0));
    worst = std::max(worst, std::abs(marginal_beta(s) - st::mixture_ls_slope(s)));
  }
  return {wrong == 0 && route_errors == 0 && worst <= 1e-9,
          std::to_string(route_errors) + " route disagreements, " + std::to_string(wrong) +
              " wrong verdicts over 2x1000 summaries; LS oracle max gap " + fmt("%.1e", worst)};
}

Outcome samuels() {
  std::mt19937_64 rng(2505);
  std::uniform_int_distribution<int> size(2, 4);
  int reversals = 0, exercised = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto kind = static_cast<st::Linkage>(trial % 4);
    const auto joint = st::samuels_joint(rng, kind, size(rng), size(rng), size(rng));
    const auto rep = detect_assoc_reversal(joint, Relation::r3);
    reversals += rep.reversal;
    bool all = true;
    for (const auto& c : rep.conditional_down) all = all && c.strict;
    exercised += all;
  }
  const auto ce = st::r4_counterexample();
  const bool ce_ok = double_linkage(ce).w_indep_x_given_y && detect_assoc_reversal(ce, Relation::r4).reversal;
  return {reversals == 0 && ce_ok, std::to_string(reversals) + " R3 reversals in 1000 draws (" +
                                       std::to_string(exercised) + " with conditional R3 down in every stratum); " +
                                       "R4 counterexample " + (ce_ok ? "detected" : "missed")};
}

Outcome dependence_examples() {
  using clock = std::chrono::steady_clock;
  double worst_res = 0, worst_mix = 0;
  auto t0 = clock::now();
  for (const auto& g : {GaussianInteraction{1.0, 0.5, 0.8, 1.0, 0.0}, GaussianInteraction{-0.7, 1.3, -0.4, 0.6, 0.0},
                        GaussianInteraction{2.0, -1.0, 1.5, 1.8, 0.0}}) {
    const DependenceModel m = g;
    const auto v = check_avg_collapsibility(m, default_grid(m));
    worst_res = std::max(worst_res, v.max_residual);
    worst_mix = std::max(worst_mix, v.max_mixing_residual);
  }
  const double t3 = std::chrono::duration<double>(clock::now() - t0).count();
  t0 = clock::now();
  const DependenceModel u = UniformQuadratic{};
  const auto v = check_avg_collapsibility(u, default_grid(u));
  double worst_int = 0;
  for (const auto& p : v.points) worst_int = std::max(worst_int, std::abs(p.mixing_integral));
  const double t4 = std::chrono::duration<double>(clock::now() - t0).count();
  const bool ok = worst_res <= 1e-6 && worst_mix <= 1e-6 && t3 < 5 && worst_int <= 1e-6 && !v.w_indep_x &&
                  !v.y_indep_w_given_x && t4 < 5;
  return {ok, "Example 3 residual " + fmt("%.1e", worst_res) + ", mixing " + fmt("%.1e", worst_mix) + " (" +
                  fmt("%.3f", t3) + " s); Example 4 integral " + fmt("%.1e", worst_int) + ", no CI condition (" +
                  fmt("%.3f", t4) + " s)"};
}

Outcome survival() {
  std::mt19937_64 rng(2506);
  std::uniform_real_distribution<double> u(-3, 3);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    SurvivalSpec s;
    s.beta_x = u(rng);
    s.beta_y = u(rng);
    s.rho = u(rng);
    const auto v = check_condition(s);
    mismatches += v.condition_2_12 != v.gaussian_equiv;
  }
  SurvivalSpec yes;
  yes.beta_x = 1;
  yes.beta_y = -2;
  yes.rho = 0.8;
  const auto vy = verify_numeric(yes);
  int confirmed = 0;
  for (const auto& p : vy.numeric_confirmations)
    confirmed += p.conditional == Trend::decreasing && p.marginal == Trend::increasing;
  SurvivalSpec no = yes;
  no.rho = 0.4;
  const auto vn = verify_numeric(no);
  const bool ok = mismatches == 0 && vy.condition_2_12 && confirmed == 12 &&
                  vy.numeric_confirmations.size() == 12 && !vn.condition_2_12 && !vn.reversal_anywhere;
  return {ok, std::to_string(mismatches) + " flag mismatches in 10^4 triples; rho 0.8 confirms " +
                  std::to_string(confirmed) + "/12 probes; rho 0.4 " +
                  (vn.reversal_anywhere ? "shows a reversal" : "shows none")};
}

Outcome depfun_fd() {
  std::mt19937_64 rng(2507);
  std::uniform_real_distribution<double> u(-2, 2), a(-1.5, 1.5), s(0.5, 2), frac(0.05, 0.9);
  auto fd = [](const DependenceModel& m, double y, double x, double w) {
    const double h = 1e-5;
    return (conditional_cdf(m, y, x + h, w) - conditional_cdf(m, y, x - h, w)) / (2 * h);
  };
  double worst_g = 0, worst_u = 0;
  for (int i = 0; i < 100; ++i) {
    const DependenceModel g = GaussianInteraction{a(rng), a(rng), a(rng), s(rng), a(rng)};
    const double y = u(rng), x = u(rng), w = u(rng);
    worst_g = std::max(worst_g, std::abs(dep_fn(g, y, x, w) - fd(g, y, x, w)));
  }
  const DependenceModel uq = UniformQuadratic{};
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), w = u(rng);
    const double y = frac(rng) / (x * x + (w - x) * (w - x));
    worst_u = std::max(worst_u, std::abs(dep_fn(uq, y, x, w) - fd(uq, y, x, w)));
  }
  return {worst_g <= 1e-6 && worst_u <= 1e-6,
          "max gap gaussian " + fmt("%.1e", worst_g) + ", uniform " + fmt("%.1e", worst_u)};
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"Example 1 reproduction", 0.1, example1},
      {"Example 2 reproduction", 0, example2},
      {"Remark 2 fractions", 0, remark2},
      {"Mobius roundtrip", 0, mobius},
      {"Theorem 2 residual vs direct comparison", 0, theorem2},
      {"Theorem 3 strict collapsibility vs CI", 0, theorem3},
      {"Theorem 4 / Theorem 6 route agreement", 0, regression},
      {"Samuels R3 property", 0, samuels},
      {"Examples 3 and 4 dependence functions", 0, dependence_examples},
      {"Survival Gaussian equivalence", 30, survival},
      {"dep_fn vs finite differences", 0, depfun_fd},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += "; over the " + fmt("%g", c.time_limit) + " s limit";
    }
    failed += !o.pass;
    std::printf("%s  %-42s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
