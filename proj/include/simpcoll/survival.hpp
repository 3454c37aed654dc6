#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simpcoll/quadrature.hpp"

namespace simpcoll {

/// Law of the error W in K(T) = -β_x X - β_y Y + W.
enum class WLaw {
  std_normal,
  gumbel_min,  // F̄_W(u) = exp(-e^u), the proportional hazards case
  logistic,    // F̄_W(u) = 1/(1 + e^u), the proportional odds case
};

std::string to_string(WLaw law);
WLaw parse_w_law(const std::string& name);

/// Strictly increasing transform tabulated at knots, linear in between and
/// extended linearly past the end knots.
class TabulatedTransform {
 public:
  TabulatedTransform(std::vector<double> t, std::vector<double> k);
  double operator()(double t) const;
  double derivative(double t) const;
  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return k_; }

 private:
  std::size_t segment(double t) const;
  std::vector<double> t_, k_;
};

struct SurvivalSpec {
  double beta_x = 0.0;
  double beta_y = 0.0;
  double mu = 0.0;   // η(x) = μ + ρx, and Y = η(X) + V with V standard normal
  double rho = 0.0;
  WLaw w_law = WLaw::std_normal;
  std::optional<TabulatedTransform> k;  // identity when unset
};

void validate(const SurvivalSpec& spec);

double transform(const SurvivalSpec& spec, double t);
double transform_derivative(const SurvivalSpec& spec, double t);

/// F̄_W(u) and the hazard f_W(u)/F̄_W(u).
double w_survival(WLaw law, double u);
double w_log_survival(WLaw law, double u);
double w_hazard(WLaw law, double u);

/// P(T > t | x, y) = F̄_W(K(t) + β_x x + β_y y).
double conditional_survival(const SurvivalSpec& spec, double t, double x, double y);
/// P(T > t + s | T > t, x, y).
double conditional_residual_survival(const SurvivalSpec& spec, double t, double s, double x, double y);
/// h(t | x, y) = K'(t) · h_W(K(t) + β_x x + β_y y).
double conditional_hazard(const SurvivalSpec& spec, double t, double x, double y);

/// P(T > t | x) = ∫ P(T > t | x, y) φ(y - μ - ρx) dy.
double marginal_survival(const SurvivalSpec& spec, double t, double x, const QuadratureOptions& opts = {});
double marginal_residual_survival(const SurvivalSpec& spec, double t, double s, double x,
                                  const QuadratureOptions& opts = {});
/// -d/dt ln P(T > t | x) by central differences.
double marginal_hazard(const SurvivalSpec& spec, double t, double x, double step = 1e-4,
                       const QuadratureOptions& opts = {});

enum class Trend { increasing, decreasing, constant, mixed };
std::string to_string(Trend t);

/// Trend of a sequence sampled on an increasing grid; steps within `tol` count as flat.
Trend classify_trend(const std::vector<double>& values, double tol);

struct ProbeGrid {
  std::vector<double> x{-1, -0.5, 0, 0.5, 1};
  std::vector<double> y{-2, -1, 0, 1, 2};
  std::vector<double> t{0.25, 0.5, 1, 2};
  std::vector<double> s{0.25, 0.5, 1};
};

struct SurvivalProbe {
  double t = 0.0;
  double s = 0.0;
  Trend conditional = Trend::mixed;  // common trend in x over every probed y
  Trend marginal = Trend::mixed;
  bool reversal = false;
};

struct HazardProbe {
  double t = 0.0;
  Trend conditional = Trend::mixed;
  Trend marginal = Trend::mixed;
  bool reversal = false;
};

struct SurvivalVerdict {
  bool condition_2_12 = false;  // β_y < 0 < β_x and β_x + β_y ρ < 0
  bool gaussian_equiv = false;  // β_y < 0 < β_x and ρ > β_x / |β_y|
  std::vector<SurvivalProbe> numeric_confirmations;
  std::vector<HazardProbe> hazard_confirmations;
  bool reversal_everywhere = false;
  bool reversal_anywhere = false;
};

SurvivalVerdict check_condition(const SurvivalSpec& spec);

/// Probes the survival-probability reversal on the grid and the hazard-rate
/// reversal at each probed t.
SurvivalVerdict verify_numeric(const SurvivalSpec& spec, const ProbeGrid& grid = {}, double tol = 1e-10,
                               const QuadratureOptions& opts = {});

}  // namespace simpcoll
