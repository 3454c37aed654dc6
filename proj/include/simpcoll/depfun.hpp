#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simpcoll/errors.hpp"
#include "simpcoll/quadrature.hpp"

namespace simpcoll {

/// Y = α₁X + α₂W + α₃XW + ε, ε ~ N(0, σ²), with (W | X = x) ~ N(ρx, 1).
/// ρ = 0 gives W standard normal and independent of X.
struct GaussianInteraction {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double sigma = 1.0;
  double w_mean_slope = 0.0;
};

/// (Y | x, w) ~ U(0, 1/(x² + (w-x)²)) with (W | X = x) ~ N(x, 1).
struct UniformQuadratic {};

using DependenceModel = std::variant<GaussianInteraction, UniformQuadratic>;

std::string family_name(const DependenceModel& model);
void validate(const DependenceModel& model);

/// F(y | x, w).
double conditional_cdf(const DependenceModel& model, double y, double x, double w);
/// ∂F(y|x,w)/∂x; throws InputError outside the family's support.
double dep_fn(const DependenceModel& model, double y, double x, double w);
/// ∂F(y|x,w)/∂x of the piecewise F, zero where F is locally constant in x.
double dep_fn_piecewise(const DependenceModel& model, double y, double x, double w);
/// f(w | x) and ∂f(w|x)/∂x.
double w_density(const DependenceModel& model, double w, double x);
double w_density_dx(const DependenceModel& model, double w, double x);

/// F(y | x) and ∂F(y|x)/∂x in closed form.
double marginal_cdf(const DependenceModel& model, double y, double x);
double marginal_dep_closed(const DependenceModel& model, double y, double x);
/// F(y | x) by quadrature over f(w | x).
double marginal_cdf_quadrature(const DependenceModel& model, double y, double x, const QuadratureOptions& opts = {});
struct NumericDerivative {
  double value = 0.0;
  double error = 0.0;  // gap between successive extrapolation levels
};

/// ∂F(y|x)/∂x by Richardson-extrapolated central differences of the quadrature F(y|x).
NumericDerivative marginal_dep_numeric_estimate(const DependenceModel& model, double y, double x);
double marginal_dep_numeric(const DependenceModel& model, double y, double x);

struct GridPoint {
  double y = 0.0;
  double x = 0.0;
};

/// y, x ∈ {-2, -1, -0.5, 0.5, 1, 2}, restricted to the family's y-domain.
std::vector<GridPoint> default_grid(const DependenceModel& model);
std::vector<double> default_w_probes();

struct HomogeneityResult {
  bool homogeneous = false;
  double max_gap = 0.0;
  GridPoint worst;
  double w = 0.0, w_prime = 0.0;
};

HomogeneityResult check_homogeneity(const DependenceModel& model, const std::vector<GridPoint>& grid,
                                    const std::vector<double>& w_values, double tol = 1e-9);

enum class MarginalMethod { closed_form, numeric };

struct DepPoint {
  GridPoint at;
  double averaged_dep = 0.0;  // E_{W|x} ∂F(y|x,W)/∂x
  double marginal_dep = 0.0;  // ∂F(y|x)/∂x
  double residual = 0.0;      // |averaged - marginal|
  double mixing_integral = 0.0;  // ∫ F(y|x,w) ∂f(w|x)/∂x dw
  double mixing_residual = 0.0;  // |marginal - (averaged + mixing)|
};

struct DepVerdict {
  std::string family;
  bool homogeneous = false;
  bool avg_collapsible = false;
  bool w_indep_x = false;          // ∂f(w|x)/∂x vanishes on the probes
  bool y_indep_w_given_x = false;  // F(y|x,w) free of w on the probes
  double max_residual = 0.0;
  double max_integral = 0.0;
  double max_mixing_residual = 0.0;
  double max_quadrature_error = 0.0;
  double max_derivative_error = 0.0;  // numeric method only
  MarginalMethod method = MarginalMethod::closed_form;
  std::vector<DepPoint> points;
};

DepVerdict check_avg_collapsibility(const DependenceModel& model, const std::vector<GridPoint>& grid,
                                    double tol = 1e-6, MarginalMethod method = MarginalMethod::closed_form,
                                    const QuadratureOptions& opts = {});

std::string to_string(MarginalMethod m);

}  // namespace simpcoll
