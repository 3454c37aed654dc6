#include <doctest.h>

#include <cmath>
#include <random>

#include "simpcoll/errors.hpp"
#include "simpcoll/survival.hpp"

using namespace simpcoll;

namespace {

SurvivalSpec spec(double bx, double by, double rho, WLaw law = WLaw::std_normal) {
  SurvivalSpec s;
  s.beta_x = bx;
  s.beta_y = by;
  s.mu = 0.0;
  s.rho = rho;
  s.w_law = law;
  return s;
}

}  // namespace

TEST_CASE("condition flags") {
  const auto yes = check_condition(spec(1, -2, 0.8));
  CHECK(yes.condition_2_12);
  CHECK(yes.gaussian_equiv);
  for (double rho : {-3.0, 0.0, 0.8, 5.0}) {
    CHECK_FALSE(check_condition(spec(1, 0.5, rho)).condition_2_12);
    CHECK_FALSE(check_condition(spec(1, 0.5, rho)).gaussian_equiv);
  }
  const auto no = check_condition(spec(1, -2, 0.4));
  CHECK_FALSE(no.condition_2_12);
  CHECK_FALSE(no.gaussian_equiv);
  CHECK_FALSE(check_condition(spec(-1, -2, 0.8)).condition_2_12);
}

TEST_CASE("the two condition flags agree on random triples") {
  std::mt19937_64 rng(131);
  std::uniform_real_distribution<double> u(-3, 3);
  int true_count = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto v = check_condition(spec(u(rng), u(rng), u(rng)));
    REQUIRE(v.condition_2_12 == v.gaussian_equiv);
    true_count += v.condition_2_12;
  }
  CHECK(true_count > 500);
}

TEST_CASE("W laws") {
  CHECK(w_survival(WLaw::std_normal, 0.0) == doctest::Approx(0.5));
  CHECK(w_survival(WLaw::gumbel_min, 0.3) == doctest::Approx(std::exp(-std::exp(0.3))));
  CHECK(w_survival(WLaw::logistic, 0.3) == doctest::Approx(1 / (1 + std::exp(0.3))));
  CHECK(w_hazard(WLaw::gumbel_min, 0.3) == doctest::Approx(std::exp(0.3)));
  CHECK(w_hazard(WLaw::logistic, 0.3) == doctest::Approx(std::exp(0.3) / (1 + std::exp(0.3))));
  for (WLaw law : {WLaw::std_normal, WLaw::gumbel_min, WLaw::logistic})
    for (double u : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
      const double h = 1e-6;
      const double fd = -(std::log(w_survival(law, u + h)) - std::log(w_survival(law, u - h))) / (2 * h);
      CHECK(w_hazard(law, u) == doctest::Approx(fd).epsilon(1e-6));
    }
  // the normal hazard stays finite and close to u far in the tail
  CHECK(w_hazard(WLaw::std_normal, 40.0) == doctest::Approx(40.0).epsilon(1e-3));
  CHECK(w_log_survival(WLaw::std_normal, 3.0) == doctest::Approx(std::log(normal_sf(3.0))).epsilon(1e-14));
  CHECK(w_log_survival(WLaw::std_normal, 40.0) == doctest::Approx(-800 - std::log(40.0) - 0.5 * std::log(2 * M_PI)).epsilon(1e-6));
  CHECK(w_log_survival(WLaw::logistic, 800.0) == doctest::Approx(-800.0));
  // residual survival far in the tail, where F̄_W itself underflows
  const auto far = spec(1, 0, 0, WLaw::gumbel_min);
  CHECK(conditional_residual_survival(far, 800, 1e-3, 0, 0) == 0.0);
  CHECK(conditional_residual_survival(spec(1, 0, 0), 50, 0.01, 0, 0) == doctest::Approx(std::exp(-0.5 * (50.01 * 50.01 - 2500) - std::log(50.01 / 50))).epsilon(1e-4));
  CHECK(parse_w_law("gumbel-min") == WLaw::gumbel_min);
  CHECK(to_string(WLaw::logistic) == "logistic");
  CHECK_THROWS_AS(parse_w_law("weibull"), InputError);
}

TEST_CASE("conditional residual survival lies in (0, 1] and falls in s") {
  // ranges keep exp(-e^u) representable for the Gumbel law
  std::mt19937_64 rng(137);
  std::uniform_real_distribution<double> u(-1, 1), t(0, 2);
  for (int i = 0; i < 500; ++i) {
    const auto sp = spec(u(rng), u(rng), u(rng), static_cast<WLaw>(i % 3));
    const double tt = t(rng), x = u(rng), y = u(rng);
    double previous = 1.0;
    for (double s : {0.1, 0.3, 0.9, 2.0}) {
      const double r = conditional_residual_survival(sp, tt, s, x, y);
      REQUIRE(r > 0.0);
      REQUIRE(r <= previous);
      previous = r;
    }
  }
}

TEST_CASE("Gaussian marginal survival matches the normal convolution") {
  // -β_y Y + W = -β_y(μ + ρx) + (W - β_y V), a normal with variance 1 + β_y²
  std::mt19937_64 rng(139);
  std::uniform_real_distribution<double> u(-2, 2), t(0, 3);
  for (int i = 0; i < 200; ++i) {
    SurvivalSpec sp = spec(u(rng), u(rng), u(rng));
    sp.mu = u(rng);
    const double tt = t(rng), x = u(rng);
    const double z = (tt + (sp.beta_x + sp.beta_y * sp.rho) * x + sp.beta_y * sp.mu) / std::sqrt(1 + sp.beta_y * sp.beta_y);
    REQUIRE(std::abs(marginal_survival(sp, tt, x) - normal_sf(z)) <= 1e-9);
  }
}

TEST_CASE("Cox case has proportional hazards") {
  const auto sp = spec(0.7, -0.4, 0.3, WLaw::gumbel_min);
  const double pts[][3] = {{0.2, -1, 0.5}, {0.5, 0, 0}, {1.0, 0.5, -1}, {1.5, 1, 2}, {2.5, -0.5, 1}};
  for (const auto& p : pts) {
    const double t = p[0], x = p[1], y = p[2];
    // h₀(t) e^{β_x x + β_y y} with h₀(t) = K'(t) e^{K(t)} = e^t for the identity K
    const double expected = std::exp(t) * std::exp(0.7 * x - 0.4 * y);
    CHECK(std::abs(conditional_hazard(sp, t, x, y) - expected) <= 1e-8 * expected);
    const double h = 1e-5;
    const double fd = -(std::log(conditional_survival(sp, t + h, x, y)) - std::log(conditional_survival(sp, t - h, x, y))) / (2 * h);
    CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("Cox marginal hazards are not proportional even with independent covariates") {
  // informational: with ρ = 0, integrating out Y breaks proportionality in x
  const auto sp = spec(0.7, -1.0, 0.0, WLaw::gumbel_min);
  const double r1 = marginal_hazard(sp, 0.25, 1.0) / marginal_hazard(sp, 0.25, 0.0);
  const double r2 = marginal_hazard(sp, 2.0, 1.0) / marginal_hazard(sp, 2.0, 0.0);
  CHECK(std::abs(r1 - r2) > 1e-3);
  CHECK(r1 < std::exp(0.7) + 1e-9);
}

TEST_CASE("classify_trend") {
  CHECK(classify_trend({1, 2, 3}, 1e-12) == Trend::increasing);
  CHECK(classify_trend({3, 2, 1}, 1e-12) == Trend::decreasing);
  CHECK(classify_trend({1, 1, 1}, 1e-12) == Trend::constant);
  CHECK(classify_trend({1, 2, 1}, 1e-12) == Trend::mixed);
  CHECK(classify_trend({1, 1, 2}, 1e-12) == Trend::mixed);
  CHECK(classify_trend({1, 1 + 1e-14, 1 + 2e-14}, 1e-12) == Trend::constant);
  CHECK(to_string(Trend::decreasing) == "decreasing");
}

TEST_CASE("numeric verification with the condition true") {
  const auto v = verify_numeric(spec(1, -2, 0.8));
  CHECK(v.condition_2_12);
  REQUIRE(v.numeric_confirmations.size() == 12);
  for (const auto& p : v.numeric_confirmations) {
    CHECK(p.conditional == Trend::decreasing);
    CHECK(p.marginal == Trend::increasing);
    CHECK(p.reversal);
  }
  CHECK(v.reversal_everywhere);
  REQUIRE(v.hazard_confirmations.size() == 4);
  for (const auto& h : v.hazard_confirmations) {
    CHECK(h.conditional == Trend::increasing);
    CHECK(h.marginal == Trend::decreasing);
    CHECK(h.reversal);
  }
}

TEST_CASE("numeric verification at the named probe") {
  ProbeGrid g;
  g.t = {0.5};
  g.s = {0.5};
  const auto v = verify_numeric(spec(1, -2, 0.8), g);
  REQUIRE(v.numeric_confirmations.size() == 1);
  CHECK(v.numeric_confirmations[0].conditional == Trend::decreasing);
  CHECK(v.numeric_confirmations[0].marginal == Trend::increasing);
}

TEST_CASE("numeric verification without the condition") {
  const auto v = verify_numeric(spec(1, -2, 0.4));
  CHECK_FALSE(v.condition_2_12);
  CHECK_FALSE(v.reversal_anywhere);
  for (const auto& p : v.numeric_confirmations) CHECK(p.marginal == Trend::decreasing);

  const auto flat = verify_numeric(spec(1, 0, 0.8));
  CHECK_FALSE(flat.reversal_anywhere);
  for (const auto& p : flat.numeric_confirmations) CHECK(p.conditional == p.marginal);
}

TEST_CASE("condition flag predicts the grid verdict on random Gaussian specs") {
  std::mt19937_64 rng(149);
  std::uniform_real_distribution<double> bx(0.2, 2), by(-2, -0.2), rho(-1.5, 3);
  int reversals = 0;
  for (int i = 0; i < 40; ++i) {
    const auto sp = spec(bx(rng), by(rng), rho(rng));
    // stay clear of the boundary where the marginal trend is flat
    if (std::abs(sp.beta_x + sp.beta_y * sp.rho) < 0.05) continue;
    const auto v = verify_numeric(sp);
    REQUIRE(v.reversal_everywhere == v.condition_2_12);
    REQUIRE(v.reversal_anywhere == v.condition_2_12);
    reversals += v.reversal_everywhere;
  }
  CHECK(reversals > 5);
}

TEST_CASE("tabulated transform") {
  const TabulatedTransform k({0, 1, 3}, {-1, 0, 4});
  CHECK(k(0.5) == doctest::Approx(-0.5));
  CHECK(k(2.0) == doctest::Approx(2.0));
  CHECK(k(4.0) == doctest::Approx(6.0));
  CHECK(k(-1.0) == doctest::Approx(-2.0));
  CHECK(k.derivative(2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(TabulatedTransform({0}, {1}), InputError);
  CHECK_THROWS_AS(TabulatedTransform({0, 1}, {1, 1}), InputError);
  CHECK_THROWS_AS(TabulatedTransform({1, 0}, {0, 1}), InputError);
  CHECK_THROWS_AS(TabulatedTransform({0, 1, 2}, {0, 1}), InputError);

  // an increasing K does not change the reversal pattern
  auto sp = spec(1, -2, 0.8);
  sp.k = TabulatedTransform({0, 0.5, 1, 2, 4}, {-3, -1, 0, 0.5, 2});
  CHECK(verify_numeric(sp).reversal_everywhere);
}

TEST_CASE("verify_numeric input errors") {
  ProbeGrid g;
  g.x = {0.0};
  CHECK_THROWS_AS(verify_numeric(spec(1, -2, 0.8), g), InputError);
  g = {};
  g.s = {0.0};
  CHECK_THROWS_AS(verify_numeric(spec(1, -2, 0.8), g), InputError);
  g = {};
  g.t = {-1.0};
  CHECK_THROWS_AS(verify_numeric(spec(1, -2, 0.8), g), InputError);
  CHECK_THROWS_AS(verify_numeric(spec(NAN, -2, 0.8)), InputError);
}
