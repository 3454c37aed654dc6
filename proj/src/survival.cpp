#include "simpcoll/survival.hpp"

#include <algorithm>
#include <cmath>

#include "simpcoll/errors.hpp"

namespace simpcoll {

namespace {

constexpr double kHalfWidth = 8.0;

void require_grid(const std::vector<double>& g, const char* name, std::size_t min_size) {
  if (g.size() < min_size) throw InputError(std::string("probe grid '") + name + "' is too small");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) throw InputError(std::string("non-finite value in probe grid '") + name + "'");
    if (i > 0 && !(g[i] > g[i - 1])) throw InputError(std::string("probe grid '") + name + "' must be increasing");
  }
}

Trend combine(Trend a, Trend b) { return a == b ? a : Trend::mixed; }

bool opposite(Trend a, Trend b) {
  return (a == Trend::decreasing && b == Trend::increasing) || (a == Trend::increasing && b == Trend::decreasing);
}

}  // namespace

std::string to_string(WLaw law) {
  switch (law) {
    case WLaw::std_normal: return "std-normal";
    case WLaw::gumbel_min: return "gumbel-min";
    case WLaw::logistic: return "logistic";
  }
  return "?";
}

WLaw parse_w_law(const std::string& name) {
  if (name == "std-normal") return WLaw::std_normal;
  if (name == "gumbel-min") return WLaw::gumbel_min;
  if (name == "logistic") return WLaw::logistic;
  throw InputError("unknown W law '" + name + "' (expected std-normal, gumbel-min or logistic)");
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    case Trend::constant: return "constant";
    case Trend::mixed: return "mixed";
  }
  return "?";
}

TabulatedTransform::TabulatedTransform(std::vector<double> t, std::vector<double> k)
    : t_(std::move(t)), k_(std::move(k)) {
  if (t_.size() != k_.size() || t_.size() < 2) throw InputError("tabulated K needs at least two (t, K) knots");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(k_[i])) throw InputError("non-finite knot in tabulated K");
    if (i > 0 && !(t_[i] > t_[i - 1] && k_[i] > k_[i - 1]))
      throw InputError("tabulated K must be strictly increasing in t and K");
  }
}

std::size_t TabulatedTransform::segment(double t) const {
  const auto it = std::upper_bound(t_.begin() + 1, t_.end() - 1, t);
  return static_cast<std::size_t>(it - t_.begin()) - 1;
}

double TabulatedTransform::operator()(double t) const {
  const std::size_t i = segment(t);
  return k_[i] + derivative(t) * (t - t_[i]);
}

double TabulatedTransform::derivative(double t) const {
  const std::size_t i = segment(t);
  return (k_[i + 1] - k_[i]) / (t_[i + 1] - t_[i]);
}

void validate(const SurvivalSpec& spec) {
  for (double v : {spec.beta_x, spec.beta_y, spec.mu, spec.rho})
    if (!std::isfinite(v)) throw InputError("non-finite survival model parameter");
}

double transform(const SurvivalSpec& spec, double t) { return spec.k ? (*spec.k)(t) : t; }
double transform_derivative(const SurvivalSpec& spec, double t) { return spec.k ? spec.k->derivative(t) : 1.0; }

double w_survival(WLaw law, double u) {
  switch (law) {
    case WLaw::std_normal: return normal_sf(u);
    case WLaw::gumbel_min: return std::exp(-std::exp(u));
    case WLaw::logistic: return 1.0 / (1.0 + std::exp(u));
  }
  return 0.0;
}

double w_log_survival(WLaw law, double u) {
  switch (law) {
    case WLaw::std_normal: {
      const double sf = normal_sf(u);
      if (sf > 1e-300) return std::log(sf);
      // asymptotic tail: ln φ(u) - ln u + ln(1 - 1/u² + 3/u⁴)
      const double u2 = u * u;
      return -0.5 * u2 - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(u) + std::log1p(-1.0 / u2 + 3.0 / (u2 * u2));
    }
    case WLaw::gumbel_min: return -std::exp(u);
    case WLaw::logistic: return u > 0 ? -u - std::log1p(std::exp(-u)) : -std::log1p(std::exp(u));
  }
  return 0.0;
}

double w_hazard(WLaw law, double u) {
  switch (law) {
    case WLaw::std_normal: {
      const double sf = normal_sf(u);
      // Mills ratio asymptote once the tail underflows
      return sf > 0 ? normal_pdf(u) / sf : u;
    }
    case WLaw::gumbel_min: return std::exp(u);
    case WLaw::logistic: return 1.0 / (1.0 + std::exp(-u));
  }
  return 0.0;
}

double conditional_survival(const SurvivalSpec& spec, double t, double x, double y) {
  return w_survival(spec.w_law, transform(spec, t) + spec.beta_x * x + spec.beta_y * y);
}

double conditional_residual_survival(const SurvivalSpec& spec, double t, double s, double x, double y) {
  const double lp = spec.beta_x * x + spec.beta_y * y;
  const double u0 = transform(spec, t) + lp, u1 = transform(spec, t + s) + lp;
  // ln F̄(u1) - ln F̄(u0); the Gumbel form avoids differencing two overflowing logs
  const double log_ratio = spec.w_law == WLaw::gumbel_min ? -std::exp(u0) * std::expm1(u1 - u0)
                                                          : w_log_survival(spec.w_law, u1) - w_log_survival(spec.w_law, u0);
  return std::exp(log_ratio);
}

double conditional_hazard(const SurvivalSpec& spec, double t, double x, double y) {
  return transform_derivative(spec, t) *
         w_hazard(spec.w_law, transform(spec, t) + spec.beta_x * x + spec.beta_y * y);
}

double marginal_survival(const SurvivalSpec& spec, double t, double x, const QuadratureOptions& opts) {
  const double center = spec.mu + spec.rho * x;
  const auto r = integrate([&](double y) { return conditional_survival(spec, t, x, y) * normal_pdf(y - center); },
                           center - kHalfWidth, center + kHalfWidth, {}, opts);
  if (!r.converged && r.error > opts.tol)
    throw NumericalError("marginal survival quadrature did not converge at t=" + std::to_string(t), r.error);
  return r.value;
}

double marginal_residual_survival(const SurvivalSpec& spec, double t, double s, double x,
                                  const QuadratureOptions& opts) {
  const double base = marginal_survival(spec, t, x, opts);
  if (!(base > 0)) throw NumericalError("marginal survival underflows at t=" + std::to_string(t), base);
  return marginal_survival(spec, t + s, x, opts) / base;
}

double marginal_hazard(const SurvivalSpec& spec, double t, double x, double step, const QuadratureOptions& opts) {
  const double up = marginal_survival(spec, t + step, x, opts);
  const double down = marginal_survival(spec, t - step, x, opts);
  return -(std::log(up) - std::log(down)) / (2 * step);
}

Trend classify_trend(const std::vector<double>& values, double tol) {
  if (values.size() < 2) throw InputError("trend needs at least two values");
  std::size_t up = 0, down = 0, flat = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (d > tol)
      ++up;
    else if (d < -tol)
      ++down;
    else
      ++flat;
  }
  if (flat == values.size() - 1) return Trend::constant;
  // strict monotonicity is required; a flat step counts against it
  if (flat > 0 || (up > 0 && down > 0)) return Trend::mixed;
  return up > 0 ? Trend::increasing : Trend::decreasing;
}

SurvivalVerdict check_condition(const SurvivalSpec& spec) {
  validate(spec);
  SurvivalVerdict v;
  const bool signs = spec.beta_y < 0 && spec.beta_x > 0;
  v.condition_2_12 = signs && spec.beta_x + spec.beta_y * spec.rho < 0;
  v.gaussian_equiv = signs && spec.rho > spec.beta_x / std::abs(spec.beta_y);
  return v;
}

SurvivalVerdict verify_numeric(const SurvivalSpec& spec, const ProbeGrid& grid, double tol,
                               const QuadratureOptions& opts) {
  SurvivalVerdict v = check_condition(spec);
  require_grid(grid.x, "x", 2);
  require_grid(grid.y, "y", 1);
  require_grid(grid.t, "t", 1);
  require_grid(grid.s, "s", 1);
  for (double t : grid.t)
    if (t < 0) throw InputError("probe times must be nonnegative");
  for (double s : grid.s)
    if (!(s > 0)) throw InputError("probe increments must be positive");

  std::vector<double> values(grid.x.size());
  for (double t : grid.t) {
    for (double s : grid.s) {
      SurvivalProbe p;
      p.t = t;
      p.s = s;
      std::optional<Trend> cond;
      for (double y : grid.y) {
        for (std::size_t i = 0; i < grid.x.size(); ++i)
          values[i] = conditional_residual_survival(spec, t, s, grid.x[i], y);
        const Trend tr = classify_trend(values, tol);
        cond = cond ? combine(*cond, tr) : tr;
      }
      p.conditional = *cond;
      for (std::size_t i = 0; i < grid.x.size(); ++i)
        values[i] = marginal_residual_survival(spec, t, s, grid.x[i], opts);
      p.marginal = classify_trend(values, tol);
      p.reversal = opposite(p.conditional, p.marginal);
      v.numeric_confirmations.push_back(p);
    }

    HazardProbe h;
    h.t = t;
    std::optional<Trend> cond;
    for (double y : grid.y) {
      for (std::size_t i = 0; i < grid.x.size(); ++i) values[i] = conditional_hazard(spec, t, grid.x[i], y);
      const Trend tr = classify_trend(values, tol);
      cond = cond ? combine(*cond, tr) : tr;
    }
    h.conditional = *cond;
    // finite-difference hazards carry step² truncation error, so flat steps are judged coarser
    for (std::size_t i = 0; i < grid.x.size(); ++i) values[i] = marginal_hazard(spec, t, grid.x[i], 1e-4, opts);
    h.marginal = classify_trend(values, std::max(tol, 1e-7));
    h.reversal = opposite(h.conditional, h.marginal);
    v.hazard_confirmations.push_back(h);
  }
  v.reversal_everywhere = std::all_of(v.numeric_confirmations.begin(), v.numeric_confirmations.end(),
                                      [](const SurvivalProbe& p) { return p.reversal; });
  v.reversal_anywhere = std::any_of(v.numeric_confirmations.begin(), v.numeric_confirmations.end(),
                                    [](const SurvivalProbe& p) { return p.reversal; });
  return v;
}

}  // namespace simpcoll
