#include "simpcoll/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace simpcoll::report {

namespace {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void dump(const json& j, std::ostringstream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // std::map storage: keys already sorted
        if (!first) out << ",\n";
        first = false;
        out << pad << json(k).dump() << ": ";
        dump(v, out, indent + 2);
      }
      out << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          dump(j[i], out, indent);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        dump(j[i], out, indent + 2);
      }
      out << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: out << format_double(j.get<double>()); return;
    default: out << j.dump(); return;
  }
}

json array_of(const Eigen::ArrayXd& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(a(i));
  return out;
}

std::string trend_arrow(const std::string& t) {
  if (t == "increasing") return "↑";
  if (t == "decreasing") return "↓";
  if (t == "constant") return "=";
  return "~";
}

std::string cell_text(const json& v) {
  if (v.is_object() && v.contains("value")) {
    std::string s = format_double(v.at("value").get<double>());
    if (v.contains("exact")) s = v.at("exact").get<std::string>() + " (" + s + ")";
    return s;
  }
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "n/a";
  return v.dump();
}

std::string direction_text(int d) { return d > 0 ? "+" : d < 0 ? "−" : "0"; }

void render_paradox(const json& rep, std::ostringstream& md) {
  const auto& b = rep.at("exposure");
  const std::string exp = b.at("variable").get<std::string>() + "=" + b.at("level").get<std::string>();
  const auto& a = rep.at("response");
  const std::string resp = a.at("variable").get<std::string>() + "=" + a.at("level").get<std::string>();
  const std::string cov = rep.at("covariate").get<std::string>();
  md << "### Stratified by " << cov << "\n\n";
  md << "| " << cov << " | P(" << resp << " \\| " << exp << ") | P(" << resp << " \\| not " << exp << ") | P(" << cov
     << " \\| " << exp << ") | P(" << cov << " \\| not " << exp << ") | direction |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& s : rep.at("strata"))
    md << "| " << s.at("level").get<std::string>() << " | " << cell_text(s.at("p_exposed")) << " | "
       << cell_text(s.at("p_unexposed")) << " | " << cell_text(s.at("weight_exposed")) << " | "
       << cell_text(s.at("weight_unexposed")) << " | " << direction_text(s.at("direction").get<int>()) << " |\n";
  md << "| **marginal** | " << cell_text(rep.at("marginal_exposed")) << " | "
     << cell_text(rep.at("marginal_unexposed")) << " | 1 | 1 | "
     << direction_text(rep.at("marginal_direction").get<int>()) << " |\n\n";
  md << "Reversal: **" << (rep.at("reversal").get<bool>() ? "yes" : "no") << "**\n\n";
  if (rep.contains("cornfield")) {
    const auto& c = rep.at("cornfield");
    md << "Cornfield ratio condition: " << cell_text(c.at("p_c_exposed")) << " / " << cell_text(c.at("p_c_unexposed"))
       << " > " << cell_text(c.at("p_a_exposed")) << " / " << cell_text(c.at("p_a_unexposed"))
       << " → " << cell_text(c.at("ratio_condition")) << "\n\n";
    md << "Risk-difference condition: " << cell_text(c.at("riskdiff_lhs")) << " ≥ " << cell_text(c.at("riskdiff_rhs"))
       << " → " << cell_text(c.at("riskdiff_condition")) << "\n\n";
  }
}

void render_survival(const json& r, std::ostringstream& md) {
  md << "condition (β_y < 0 < β_x, β_x + β_y ρ < 0): **" << cell_text(r.at("condition_2_12")) << "**  \n";
  md << "Gaussian form (ρ > β_x/|β_y|): **" << cell_text(r.at("gaussian_equiv")) << "**\n\n";
  if (!r.at("numeric_confirmations").empty()) {
    md << "| t | s | conditional in x | marginal in x | reversal |\n|---|---|---|---|---|\n";
    for (const auto& p : r.at("numeric_confirmations"))
      md << "| " << cell_text(p.at("t")) << " | " << cell_text(p.at("s")) << " | "
         << trend_arrow(p.at("conditional_direction").get<std::string>()) << " | "
         << trend_arrow(p.at("marginal_direction").get<std::string>()) << " | " << cell_text(p.at("reversal"))
         << " |\n";
    md << "\n";
  }
}

void render_generic(const json& j, std::ostringstream& md, int depth) {
  const std::string indent(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_primitive() || (v.is_object() && v.contains("value") && v.size() <= 2)) {
        md << indent << "- **" << k << "**: " << cell_text(v) << "\n";
      } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); })) {
        md << indent << "- **" << k << "**: [";
        for (std::size_t i = 0; i < v.size(); ++i) md << (i ? ", " : "") << cell_text(v[i]);
        md << "]\n";
      } else {
        md << indent << "- **" << k << "**:\n";
        render_generic(v, md, depth + 1);
      }
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      md << indent << "- [" << i << "]\n";
      render_generic(j[i], md, depth + 1);
    }
  } else {
    md << indent << "- " << cell_text(j) << "\n";
  }
}

}  // namespace

std::string canonical_dump(const json& j) {
  std::ostringstream out;
  dump(j, out, 0);
  out << "\n";
  return out.str();
}

json scalar(double x) { return {{"value", x}}; }
json scalar(const Rational& x) {
  const std::string exact = x.denominator() == 1 ? x.str() + "/1" : x.str();
  return {{"exact", exact}, {"value", to_double(x)}};
}

json subset(const CategoricalScheme& scheme, VarSet s) { return scheme.names(s); }

json to_json(const CiVerdict& v, const CategoricalScheme& scheme) {
  json witness = json::object();
  const auto members = v.witness_vars.members();
  for (std::size_t k = 0; k < members.size() && k < v.witness.size(); ++k)
    witness[scheme.variable(members[k]).name] =
        scheme.variable(members[k]).levels[static_cast<std::size_t>(v.witness[k])];
  return {{"holds", v.holds}, {"max_deviation", v.max_deviation}, {"witness", witness}};
}

json to_json(const HierarchyCheck& h, const CategoricalScheme& scheme) {
  json violations = json::array();
  for (const auto& v : h.violations)
    violations.push_back({{"nonzero", subset(scheme, v.nonzero)}, {"zero", subset(scheme, v.zero)}});
  return {{"hierarchical", h.hierarchical}, {"violations", violations}};
}

json to_json(const CollapseVerdict& v, const CategoricalScheme& scheme) {
  json d_tilde = json::array(), delta = json::array();
  for (const auto& s : v.d_tilde) d_tilde.push_back({{"vars", subset(scheme, s.vars)}, {"values", array_of(s.values)}});
  for (const auto& s : v.delta) delta.push_back({{"vars", subset(scheme, s.vars)}, {"values", array_of(s.values)}});
  return {{"target", subset(scheme, v.target)},
          {"margin", subset(scheme, v.margin)},
          {"collapsible", v.collapsible},
          {"tau_full", array_of(v.tau_full)},
          {"eta_marginal", array_of(v.eta_marginal)},
          {"residual", array_of(v.residual)},
          {"max_residual", v.max_residual},
          {"max_tau_eta_gap", v.max_tau_eta_gap},
          {"d", array_of(v.d)},
          {"d_tilde", d_tilde},
          {"delta", delta}};
}

json to_json(const StrictCollapseVerdict& v, const CategoricalScheme& scheme) {
  json members = json::array();
  for (const auto& m : v.members)
    members.push_back({{"target", subset(scheme, m.target)},
                       {"collapsible", m.collapsible},
                       {"max_residual", m.max_residual},
                       {"max_tau_eta_gap", m.max_tau_eta_gap}});
  return {{"a", subset(scheme, v.a)},
          {"b", subset(scheme, v.b)},
          {"c", subset(scheme, v.c)},
          {"strict", v.strict},
          {"definition_ii", v.definition_ii},
          {"ci", to_json(v.ci, scheme)},
          {"members", members},
          {"max_vanishing_tau", v.max_vanishing_tau},
          {"max_residual", v.max_residual}};
}

template <class Scalar>
json to_json(const ParadoxReport<Scalar>& rep) {
  json strata = json::array();
  for (const auto& s : rep.strata)
    strata.push_back({{"level", s.level},
                      {"p_exposed", scalar(s.p_exposed)},
                      {"p_unexposed", scalar(s.p_unexposed)},
                      {"weight_exposed", scalar(s.weight_exposed)},
                      {"weight_unexposed", scalar(s.weight_unexposed)},
                      {"direction", s.direction}});
  return {{"response", {{"variable", rep.response.variable}, {"level", rep.response.level}}},
          {"exposure", {{"variable", rep.exposure.variable}, {"level", rep.exposure.level}}},
          {"covariate", rep.covariate},
          {"strata", strata},
          {"marginal_exposed", scalar(rep.marginal_exposed)},
          {"marginal_unexposed", scalar(rep.marginal_unexposed)},
          {"marginal_direction", rep.marginal_direction},
          {"reversal", rep.reversal},
          {"mixture_residual", rep.mixture_residual}};
}

template <class Scalar>
json to_json(const CornfieldDiagnostics<Scalar>& d) {
  auto opt = [](const std::optional<Scalar>& v) { return v ? scalar(*v) : json(nullptr); };
  return {{"p_c_exposed", scalar(d.p_c_exposed)},
          {"p_c_unexposed", scalar(d.p_c_unexposed)},
          {"p_a_exposed", scalar(d.p_a_exposed)},
          {"p_a_unexposed", scalar(d.p_a_unexposed)},
          {"p_a_given_c", scalar(d.p_a_given_c)},
          {"p_a_given_not_c", scalar(d.p_a_given_not_c)},
          {"ratio_lhs", opt(d.ratio_lhs)},
          {"ratio_rhs", opt(d.ratio_rhs)},
          {"ratio_condition", d.ratio_condition ? json(*d.ratio_condition) : json(nullptr)},
          {"riskdiff_lhs", scalar(d.riskdiff_lhs)},
          {"riskdiff_rhs", scalar(d.riskdiff_rhs)},
          {"riskdiff_condition", d.riskdiff_condition}};
}

template json to_json(const ParadoxReport<double>&);
template json to_json(const ParadoxReport<Rational>&);
template json to_json(const CornfieldDiagnostics<double>&);
template json to_json(const CornfieldDiagnostics<Rational>&);

json to_json(const RelationCheck& r) { return {{"holds", r.holds}, {"strict", r.strict}}; }

json to_json(const LinkageProfile& p) {
  return {{"w_indep_y", p.w_indep_y},
          {"w_indep_x", p.w_indep_x},
          {"w_indep_y_given_x", p.w_indep_y_given_x},
          {"w_indep_x_given_y", p.w_indep_x_given_y},
          {"doubly_linked", p.doubly_linked}};
}

json to_json(const AssocReversal& r) {
  json up = json::array(), down = json::array();
  for (const auto& c : r.conditional_up) up.push_back(to_json(c));
  for (const auto& c : r.conditional_down) down.push_back(to_json(c));
  return {{"relation", to_string(r.relation)},
          {"reversal", r.reversal},
          {"direction", r.direction ? json(to_string(*r.direction)) : json(nullptr)},
          {"conditional_up", up},
          {"conditional_down", down},
          {"marginal_up", to_json(r.marginal_up)},
          {"marginal_down", to_json(r.marginal_down)}};
}

json to_json(const LinearR4Report& r) {
  return {{"cov_yx", r.cov_yx},
          {"eta", r.eta},
          {"var_y", r.var_y},
          {"marginal_slope", r.marginal_slope},
          {"reversal", r.reversal},
          {"boundary", r.boundary},
          {"magnitude_var_x", r.magnitude_var_x},
          {"magnitude_var_y", r.magnitude_var_y}};
}

json to_json(const RegressVerdict& v) {
  return {{"beta_marginal", v.beta_marginal},
          {"alpha_marginal", v.alpha_marginal},
          {"beta_average", v.beta_average},
          {"collapsible", v.collapsible},
          {"a_collapsible", v.a_collapsible},
          {"lhs", v.lhs},
          {"rhs", v.rhs},
          {"gap", v.gap}};
}

json to_json(const SufficientConditions& s) {
  return {{"y_indep_a_given_x", s.y_indep_a_given_x},
          {"x_indep_a_given_y", s.x_indep_a_given_y},
          {"a_indep_xy", s.a_indep_xy},
          {"variance_identity", s.variance_identity},
          {"variance_lhs", s.variance_lhs},
          {"variance_rhs", s.variance_rhs},
          {"mean_independent", s.mean_independent},
          {"x_support_excludes_zero", s.x_support_excludes_zero},
          {"binary_response", s.binary_response},
          {"parallel_slope_collapsible", s.parallel_slope_collapsible},
          {"random_coefficients_a_collapsible", s.random_coefficients_a_collapsible},
          {"logistic_both_a_collapsible", s.logistic_both_a_collapsible},
          {"logistic_slope_a_collapsible", s.logistic_slope_a_collapsible}};
}

json to_json(const HomogeneityResult& h) {
  return {{"homogeneous", h.homogeneous},
          {"max_gap", h.max_gap},
          {"worst", {{"y", h.worst.y}, {"x", h.worst.x}, {"w", h.w}, {"w_prime", h.w_prime}}}};
}

json to_json(const DepVerdict& v) {
  json points = json::array();
  for (const auto& p : v.points)
    points.push_back({{"y", p.at.y},
                      {"x", p.at.x},
                      {"averaged_dep", p.averaged_dep},
                      {"marginal_dep", p.marginal_dep},
                      {"residual", p.residual},
                      {"integral", p.mixing_integral},
                      {"mixing_residual", p.mixing_residual}});
  return {{"family", v.family},
          {"homogeneous", v.homogeneous},
          {"avg_collapsible", v.avg_collapsible},
          {"w_indep_x", v.w_indep_x},
          {"y_indep_w_given_x", v.y_indep_w_given_x},
          {"max_residual", v.max_residual},
          {"integral_residual", v.max_integral},
          {"max_mixing_residual", v.max_mixing_residual},
          {"max_quadrature_error", v.max_quadrature_error},
          {"max_derivative_error", v.max_derivative_error},
          {"marginal_method", to_string(v.method)},
          {"points", points}};
}

json to_json(const SurvivalVerdict& v) {
  json probes = json::array(), hazards = json::array();
  for (const auto& p : v.numeric_confirmations)
    probes.push_back({{"t", p.t},
                      {"s", p.s},
                      {"conditional_direction", to_string(p.conditional)},
                      {"marginal_direction", to_string(p.marginal)},
                      {"reversal", p.reversal}});
  for (const auto& h : v.hazard_confirmations)
    hazards.push_back({{"t", h.t},
                       {"conditional_direction", to_string(h.conditional)},
                       {"marginal_direction", to_string(h.marginal)},
                       {"reversal", h.reversal}});
  return {{"condition_2_12", v.condition_2_12},
          {"gaussian_equiv", v.gaussian_equiv},
          {"numeric_confirmations", probes},
          {"hazard_confirmations", hazards},
          {"reversal_everywhere", v.reversal_everywhere},
          {"reversal_anywhere", v.reversal_anywhere}};
}

std::string render_markdown(const json& report) {
  std::ostringstream md;
  const std::string verb = report.contains("verb") && report.at("verb").is_string() ? report.at("verb").get<std::string>() : "simpcoll";
  md << "# " << verb << "\n\n";
  if (report.contains("error")) {
    md << "**error** (" << report.at("error").at("type").get<std::string>()
       << "): " << report.at("error").at("message").get<std::string>() << "\n";
    return md.str();
  }
  md << "- input digest: `" << report.value("input_digest", "") << "`\n";
  md << "- tool version: " << report.value("tool_version", "") << "\n\n";
  const auto& result = report.at("result");
  if (verb == "scan-paradox") {
    for (const auto& entry : result.at("candidates")) {
      if (entry.contains("error")) {
        md << "### Stratified by " << entry.at("covariate").get<std::string>() << "\n\nnot evaluable: "
           << entry.at("error").get<std::string>() << "\n\n";
      } else {
        render_paradox(entry.at("report"), md);
      }
    }
    md << "Any reversal: **" << (result.at("reversal").get<bool>() ? "yes" : "no") << "**\n";
  } else if (verb == "survival-check") {
    render_survival(result.at("verdict"), md);
  } else {
    render_generic(result, md, 0);
  }
  return md.str();
}

}  // namespace simpcoll::report
