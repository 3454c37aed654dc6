#include "simpcoll/depfun.hpp"

#include <algorithm>
#include <cmath>

#include "simpcoll/errors.hpp"

namespace simpcoll {

namespace {

constexpr double kHalfWidth = 8.0;  // integration half-width in standard deviations of W | x

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double quad_form(double x, double w) { return x * x + (w - x) * (w - x); }

double w_center(const DependenceModel& model, double x) {
  return std::visit(overloaded{[&](const GaussianInteraction& g) { return g.w_mean_slope * x; },
                               [&](const UniformQuadratic&) { return x; }},
                    model);
}

// Values of w where the piecewise F(y|x,w) has a kink.
std::vector<double> w_breakpoints(const DependenceModel& model, double y, double x) {
  if (!std::holds_alternative<UniformQuadratic>(model) || y <= 0) return {};
  const double r2 = 1.0 / y - x * x;
  if (r2 <= 0) return {};
  const double r = std::sqrt(r2);
  return {x - r, x + r};
}

template <class F>
QuadratureResult integrate_over_w(const DependenceModel& model, double y, double x, F&& f,
                                  const QuadratureOptions& opts) {
  const double c = w_center(model, x);
  const auto bp = w_breakpoints(model, y, x);
  return integrate(f, c - kHalfWidth, c + kHalfWidth, bp, opts);
}

}  // namespace

std::string family_name(const DependenceModel& model) {
  return std::holds_alternative<GaussianInteraction>(model) ? "gaussian-linear-interaction" : "uniform-quadratic";
}

std::string to_string(MarginalMethod m) { return m == MarginalMethod::closed_form ? "closed-form" : "numeric"; }

void validate(const DependenceModel& model) {
  if (const auto* g = std::get_if<GaussianInteraction>(&model)) {
    for (double v : {g->alpha1, g->alpha2, g->alpha3, g->sigma, g->w_mean_slope})
      if (!std::isfinite(v)) throw InputError("non-finite model parameter");
    if (!(g->sigma > 0)) throw InputError("sigma must be positive");
  }
}

double conditional_cdf(const DependenceModel& model, double y, double x, double w) {
  return std::visit(
      overloaded{[&](const GaussianInteraction& g) {
                   const double m = g.alpha1 * x + g.alpha2 * w + g.alpha3 * x * w;
                   return normal_cdf((y - m) / g.sigma);
                 },
                 [&](const UniformQuadratic&) { return std::clamp(y * quad_form(x, w), 0.0, 1.0); }},
      model);
}

double dep_fn(const DependenceModel& model, double y, double x, double w) {
  if (std::holds_alternative<UniformQuadratic>(model)) {
    const double q = quad_form(x, w);
    if (!(q > 0) || !(y > 0) || !(y * q < 1))
      throw InputError("point outside the uniform support: y=" + std::to_string(y) + ", x=" + std::to_string(x) +
                       ", w=" + std::to_string(w));
  }
  return dep_fn_piecewise(model, y, x, w);
}

double dep_fn_piecewise(const DependenceModel& model, double y, double x, double w) {
  return std::visit(overloaded{[&](const GaussianInteraction& g) {
                                 const double m = g.alpha1 * x + g.alpha2 * w + g.alpha3 * x * w;
                                 return -(g.alpha1 + g.alpha3 * w) / g.sigma * normal_pdf((y - m) / g.sigma);
                               },
                               [&](const UniformQuadratic&) {
                                 const double yq = y * quad_form(x, w);
                                 if (y <= 0 || yq >= 1) return 0.0;
                                 return y * (4 * x - 2 * w);
                               }},
                    model);
}

double w_density(const DependenceModel& model, double w, double x) { return normal_pdf(w - w_center(model, x)); }

double w_density_dx(const DependenceModel& model, double w, double x) {
  const double u = w - w_center(model, x);
  const double slope = std::visit(overloaded{[](const GaussianInteraction& g) { return g.w_mean_slope; },
                                             [](const UniformQuadratic&) { return 1.0; }},
                                  model);
  return slope * u * normal_pdf(u);
}

double marginal_cdf(const DependenceModel& model, double y, double x) {
  return std::visit(
      overloaded{[&](const GaussianInteraction& g) {
                   const double b = g.alpha2 + g.alpha3 * x;
                   const double mean = g.alpha1 * x + b * g.w_mean_slope * x;
                   const double sd = std::sqrt(b * b + g.sigma * g.sigma);
                   return normal_cdf((y - mean) / sd);
                 },
                 [&](const UniformQuadratic&) {
                   if (y <= 0) return 0.0;
                   const double r2 = 1.0 / y - x * x;
                   if (r2 <= 0) return 1.0;
                   const double r = std::sqrt(r2);
                   const double inner = 2 * normal_cdf(r) - 1;
                   return y * (x * x + 1) * inner - 2 * y * r * normal_pdf(r) + 2 * normal_sf(r);
                 }},
      model);
}

double marginal_dep_closed(const DependenceModel& model, double y, double x) {
  return std::visit(
      overloaded{[&](const GaussianInteraction& g) {
                   const double b = g.alpha2 + g.alpha3 * x;
                   const double rho = g.w_mean_slope;
                   const double mean = g.alpha1 * x + b * rho * x;
                   const double dmean = g.alpha1 + rho * g.alpha2 + 2 * rho * g.alpha3 * x;
                   const double sd = std::sqrt(b * b + g.sigma * g.sigma);
                   const double dsd = g.alpha3 * b / sd;
                   const double z = (y - mean) / sd;
                   return normal_pdf(z) * (-dmean * sd - (y - mean) * dsd) / (sd * sd);
                 },
                 [&](const UniformQuadratic&) {
                   if (y <= 0) return 0.0;
                   const double r2 = 1.0 / y - x * x;
                   if (r2 <= 0) return 0.0;
                   return 2 * x * y * (2 * normal_cdf(std::sqrt(r2)) - 1);
                 }},
      model);
}

double marginal_cdf_quadrature(const DependenceModel& model, double y, double x, const QuadratureOptions& opts) {
  const auto r = integrate_over_w(
      model, y, x, [&](double w) { return conditional_cdf(model, y, x, w) * w_density(model, w, x); }, opts);
  return r.value;
}

NumericDerivative marginal_dep_numeric_estimate(const DependenceModel& model, double y, double x) {
  QuadratureOptions opts;
  opts.tol = 1e-13;
  const double h = 1e-2;
  auto central = [&](double step) {
    return (marginal_cdf_quadrature(model, y, x + step, opts) - marginal_cdf_quadrature(model, y, x - step, opts)) /
           (2 * step);
  };
  const double d1 = central(h), d2 = central(h / 2), d4 = central(h / 4);
  const double coarse = (4 * d2 - d1) / 3, fine = (4 * d4 - d2) / 3;
  // Two extrapolation levels disagree where F(y|x) is not smooth in x.
  return {fine, std::abs(fine - coarse)};
}

double marginal_dep_numeric(const DependenceModel& model, double y, double x) {
  return marginal_dep_numeric_estimate(model, y, x).value;
}

std::vector<GridPoint> default_grid(const DependenceModel& model) {
  const double values[] = {-2, -1, -0.5, 0.5, 1, 2};
  std::vector<GridPoint> grid;
  const bool positive_y = std::holds_alternative<UniformQuadratic>(model);
  for (double y : values)
    for (double x : values)
      if (!positive_y || y > 0) grid.push_back({y, x});
  return grid;
}

std::vector<double> default_w_probes() { return {-2, -1, -0.5, 0, 0.5, 1, 2}; }

HomogeneityResult check_homogeneity(const DependenceModel& model, const std::vector<GridPoint>& grid,
                                    const std::vector<double>& w_values, double tol) {
  if (grid.empty() || w_values.size() < 2) throw InputError("homogeneity check needs a grid and two w values");
  HomogeneityResult r;
  r.max_gap = -1.0;
  for (const auto& g : grid)
    for (std::size_t i = 0; i < w_values.size(); ++i)
      for (std::size_t j = i + 1; j < w_values.size(); ++j) {
        const double gap = std::abs(dep_fn_piecewise(model, g.y, g.x, w_values[i]) -
                                    dep_fn_piecewise(model, g.y, g.x, w_values[j]));
        if (gap > r.max_gap) {
          r.max_gap = gap;
          r.worst = g;
          r.w = w_values[i];
          r.w_prime = w_values[j];
        }
      }
  r.homogeneous = r.max_gap <= tol;
  return r;
}

DepVerdict check_avg_collapsibility(const DependenceModel& model, const std::vector<GridPoint>& grid, double tol,
                                    MarginalMethod method, const QuadratureOptions& opts) {
  validate(model);
  if (grid.empty()) throw InputError("empty evaluation grid");
  DepVerdict v;
  v.family = family_name(model);
  v.method = method;
  const auto probes = default_w_probes();
  v.homogeneous = check_homogeneity(model, grid, probes, tol).homogeneous;

  double max_density_dx = 0.0, max_cdf_gap = 0.0;
  for (const auto& g : grid) {
    for (double w : probes) max_density_dx = std::max(max_density_dx, std::abs(w_density_dx(model, w, g.x)));
    for (std::size_t i = 1; i < probes.size(); ++i)
      max_cdf_gap = std::max(max_cdf_gap, std::abs(conditional_cdf(model, g.y, g.x, probes[i]) -
                                                   conditional_cdf(model, g.y, g.x, probes[0])));

    const auto averaged = integrate_over_w(
        model, g.y, g.x, [&](double w) { return dep_fn_piecewise(model, g.y, g.x, w) * w_density(model, w, g.x); },
        opts);
    const auto mixing = integrate_over_w(
        model, g.y, g.x,
        [&](double w) { return conditional_cdf(model, g.y, g.x, w) * w_density_dx(model, w, g.x); }, opts);
    for (const auto* q : {&averaged, &mixing}) {
      v.max_quadrature_error = std::max(v.max_quadrature_error, q->error);
      if (!q->converged && q->error > tol)
        throw NumericalError("quadrature did not converge at y=" + std::to_string(g.y) + ", x=" + std::to_string(g.x),
                             q->error);
    }

    DepPoint p;
    p.at = g;
    p.averaged_dep = averaged.value;
    p.mixing_integral = mixing.value;
    if (method == MarginalMethod::closed_form) {
      p.marginal_dep = marginal_dep_closed(model, g.y, g.x);
    } else {
      const auto d = marginal_dep_numeric_estimate(model, g.y, g.x);
      v.max_derivative_error = std::max(v.max_derivative_error, d.error);
      if (d.error > tol)
        throw NumericalError("numerical derivative of F(y|x) did not settle at y=" + std::to_string(g.y) +
                                 ", x=" + std::to_string(g.x) + " (F(y|x) is not smooth there; use the closed form)",
                             d.error);
      p.marginal_dep = d.value;
    }
    p.residual = std::abs(p.averaged_dep - p.marginal_dep);
    p.mixing_residual = std::abs(p.marginal_dep - (p.averaged_dep + p.mixing_integral));
    v.max_residual = std::max(v.max_residual, p.residual);
    v.max_integral = std::max(v.max_integral, std::abs(p.mixing_integral));
    v.max_mixing_residual = std::max(v.max_mixing_residual, p.mixing_residual);
    v.points.push_back(p);
  }
  v.w_indep_x = max_density_dx <= tol;
  v.y_indep_w_given_x = max_cdf_gap <= tol;
  v.avg_collapsible = v.max_residual <= tol;
  return v;
}

}  // namespace simpcoll
