#include "simpcoll/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "simpcoll/collapse.hpp"
#include "simpcoll/io.hpp"
#include "simpcoll/loglinear.hpp"
#include "simpcoll/paradox.hpp"
#include "simpcoll/report.hpp"

namespace simpcoll::cli {

namespace {

using io::json;

/// Result payload plus the exit code it implies.
struct Outcome {
  json result;
  int code = kOk;
};

struct TableOptions {
  std::string input;
  std::vector<std::string> columns;
  std::vector<std::string> levels;  // "name=a,b,c"
  std::string weight;
  double smoothing = 0.0;
};

struct Options {
  std::string format = "json";
  TableOptions table;
  // scan-paradox
  std::string response, exposure, covariate, confounder;
  // collapse-check
  std::vector<std::string> target, margin;
  bool strict = false;
  double tau_tol = kDefaultTauTol;
  double ci_tol = kDefaultTol;
  // assoc-check
  std::string relation = "r3";
  bool linear = false;
  double beta1 = 0, beta2 = 0, cov_xw = 0, var_x = 1, var_w = 1, var_eps = 1;
  double relation_tol = 1e-12;
  // regress-audit
  std::string records, joint;
  double regress_tol = kDefaultTol;
  // dep-check
  double dep_tol = 1e-6;
  std::string method = "closed-form";
  // survival-check
  bool flags_only = false;
  double trend_tol = 1e-10;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

EventSpec parse_event(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw InputError(std::string("--") + flag + " expects VARIABLE=LEVEL, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::vector<std::string> flatten_list(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    for (auto& part : split(t, ','))
      if (!part.empty()) out.push_back(part);
  return out;
}

bool is_json_path(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".json";
}

json parse_json(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

/// Reads the input once; the digest covers exactly the bytes that were parsed.
struct Input {
  std::string path;
  std::string bytes;
  std::string digest;
};

Input load(const std::string& path) {
  Input in{path, io::read_file(path), {}};
  in.digest = io::sha256_hex(in.bytes);
  return in;
}

ContingencyTable load_table(const Input& in, const TableOptions& opts) {
  if (is_json_path(in.path)) return io::table_from_json(parse_json(in.bytes, in.path));
  io::CsvTableOptions csv;
  csv.columns = flatten_list(opts.columns);
  for (const auto& spec : opts.levels) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--levels expects NAME=l1,l2,..., got '" + spec + "'");
    csv.levels[spec.substr(0, eq)] = split(spec.substr(eq + 1), ',');
  }
  if (!opts.weight.empty()) csv.weight = opts.weight;
  return io::ingest_csv(in.bytes, csv);
}

ContingencyTable probability_table(const ContingencyTable& t, double smoothing) {
  if (t.is_probability()) return t;
  return normalize(t, smoothing > 0 ? std::optional<double>(smoothing) : std::nullopt);
}

template <class Scalar>
json scan(const BasicTable<Scalar>& table, const Options& o, bool& any_reversal) {
  const EventSpec response = parse_event(o.response, "response");
  const EventSpec exposure = parse_event(o.exposure, "exposure");
  std::optional<EventSpec> confounder;
  if (!o.confounder.empty()) confounder = parse_event(o.confounder, "confounder");

  std::vector<ScanEntry<Scalar>> entries;
  if (!o.covariate.empty()) {
    ScanEntry<Scalar> e;
    e.covariate = o.covariate;
    e.report = detect_reversal(table, response, exposure, o.covariate);
    entries.push_back(std::move(e));
  } else {
    entries = scan_strata(table, response, exposure);
  }

  json candidates = json::array();
  for (const auto& e : entries) {
    if (!e.report) {
      candidates.push_back({{"covariate", e.covariate}, {"error", e.error}});
      continue;
    }
    json rep = report::to_json(*e.report);
    // Cornfield diagnostics use the event "covariate = first level" unless a confounder event is given
    EventSpec c{e.covariate, table.scheme().variable(table.scheme().index_of(e.covariate)).levels.front()};
    if (confounder && confounder->variable == e.covariate) c = *confounder;
    rep["cornfield"] = report::to_json(cornfield(table, response, exposure, c));
    rep["cornfield"]["confounder"] = {{"variable", c.variable}, {"level", c.level}};
    any_reversal = any_reversal || e.report->reversal;
    candidates.push_back({{"covariate", e.covariate}, {"report", rep}});
  }
  return candidates;
}

Outcome do_ingest(const Input& in, const Options& o) {
  const auto table = load_table(in, o.table);
  return {{{"table", io::table_to_json(table)}, {"total", table.total()}}, kOk};
}

Outcome do_scan(const Input& in, const Options& o) {
  const auto table = load_table(in, o.table);
  bool any = false;
  json result;
  bool exact = !table.is_probability() && has_integral_cells(table);
  if (exact) {
    try {
      result["candidates"] = scan(to_exact(table), o, any);
      result["exact"] = true;
    } catch (const NumericalError&) {
      // counts too large for 128-bit fractions; the double path still applies
      any = false;
      exact = false;
    }
  }
  if (!exact) {
    result["exact"] = false;
    result["candidates"] = scan(table, o, any);
  }
  result["reversal"] = any;
  return {result, any ? kDetected : kOk};
}

Outcome do_decompose(const Input& in, const Options& o) {
  const auto table = probability_table(load_table(in, o.table), o.table.smoothing);
  const auto dec = decompose(table);
  json max_abs = json::array();
  for (VarSet z : table.scheme().all().subsets())
    max_abs.push_back({{"vars", table.scheme().names(z)}, {"max_abs_tau", dec.max_abs(z)}});
  return {{{"decomposition", io::decomposition_to_json(dec)},
           {"summary", max_abs},
           {"hierarchy", report::to_json(is_hierarchical(dec, o.tau_tol), table.scheme())}},
          kOk};
}

Outcome do_collapse(const Input& in, const Options& o) {
  const auto table = probability_table(load_table(in, o.table), o.table.smoothing);
  const auto& scheme = table.scheme();
  const auto target_tokens = flatten_list(o.target), margin_tokens = flatten_list(o.margin);
  const VarSet target = scheme.parse_subset(target_tokens);
  const VarSet margin = scheme.parse_subset(margin_tokens);
  if (o.strict) {
    // A = target, B = margin - target, C = everything outside the margin
    if (!target.subset_of(margin)) throw InputError("--target must lie inside --margin");
    const auto v = check_strict_collapsibility(table, target, margin - target, scheme.all() - margin, o.tau_tol);
    return {{{"mode", "strict"}, {"verdict", report::to_json(v, scheme)}}, v.strict ? kOk : kDetected};
  }
  const auto v = check_collapsibility(table, target, margin, o.tau_tol);
  return {{{"mode", "collapsibility"}, {"verdict", report::to_json(v, scheme)}}, v.collapsible ? kOk : kDetected};
}

Outcome do_assoc(const Input* in, const Options& o) {
  if (o.linear) {
    const auto r = linear_r4_reversal(o.beta1, o.beta2, o.cov_xw, o.var_x, o.var_w, o.var_eps);
    return {{{"mode", "linear"}, {"verdict", report::to_json(r)}}, r.reversal ? kDetected : kOk};
  }
  const auto joint = io::joint_from_json(parse_json(in->bytes, in->path));
  std::vector<Relation> relations;
  if (o.relation == "all")
    relations = {Relation::r1, Relation::r2, Relation::r3, Relation::r4};
  else
    relations = {parse_relation(o.relation)};
  json verdicts = json::array();
  bool any = false;
  for (Relation r : relations) {
    const auto rep = detect_assoc_reversal(joint, r, o.relation_tol);
    any = any || rep.reversal;
    verdicts.push_back(report::to_json(rep));
  }
  return {{{"mode", "joint"},
           {"linkage", report::to_json(double_linkage(joint, o.ci_tol))},
           {"verdicts", verdicts},
           {"reversal", any}},
          any ? kDetected : kOk};
}

Outcome do_regress(const Input& in, const Options& o) {
  if (!o.joint.empty()) {
    const auto joint = io::joint_from_json(parse_json(in.bytes, in.path));
    return {{{"mode", "joint"}, {"conditions", report::to_json(check_sufficient_conditions(joint, o.regress_tol))}},
            kOk};
  }
  json result;
  std::optional<StratifiedRegressionSummary> summary;
  if (!o.records.empty()) {
    std::vector<std::string> labels;
    summary = summarize_records(io::records_from_csv(in.bytes), &labels);
    result["mode"] = "records";
    result["strata"] = labels;
  } else {
    summary = io::summary_from_json(parse_json(in.bytes, in.path));
    result["mode"] = "summary";
  }
  result["summary"] = io::summary_to_json(*summary);
  result["marginal_var_x"] = marginal_var_x(*summary);
  const bool parallel = is_parallel(*summary);
  result["parallel"] = parallel;
  int code = kOk;
  if (parallel) {
    const auto v = check_parallel_collapsibility(*summary, o.regress_tol);
    result["parallel_verdict"] = report::to_json(v);
    if (!v.collapsible) code = kDetected;
  } else {
    result["parallel_verdict"] = nullptr;
  }
  const auto a = check_a_collapsibility(*summary, o.regress_tol);
  result["a_verdict"] = report::to_json(a);
  if (!parallel && !a.a_collapsible) code = kDetected;
  return {result, code};
}

Outcome do_dep(const Input& in, const Options& o) {
  const auto model = io::model_from_json(parse_json(in.bytes, in.path));
  MarginalMethod method;
  if (o.method == "closed-form")
    method = MarginalMethod::closed_form;
  else if (o.method == "numeric")
    method = MarginalMethod::numeric;
  else
    throw InputError("--method must be closed-form or numeric");
  const auto grid = default_grid(model);
  const auto v = check_avg_collapsibility(model, grid, o.dep_tol, method);
  return {{{"model", io::model_to_json(model)},
           {"verdict", report::to_json(v)},
           {"homogeneity", report::to_json(check_homogeneity(model, grid, default_w_probes(), o.dep_tol))}},
          v.avg_collapsible ? kOk : kDetected};
}

Outcome do_survival(const Input& in, const Options& o) {
  const auto spec = io::spec_from_json(parse_json(in.bytes, in.path));
  const auto v = o.flags_only ? check_condition(spec) : verify_numeric(spec, ProbeGrid{}, o.trend_tol);
  const bool detected = o.flags_only ? v.condition_2_12 : v.reversal_anywhere;
  return {{{"spec", io::spec_to_json(spec)}, {"verdict", report::to_json(v)}}, detected ? kDetected : kOk};
}

json error_report(const std::string& verb, const std::string& type, const std::string& message,
                  std::optional<double> achieved = std::nullopt) {
  json err = {{"type", type}, {"message", message}};
  if (achieved) err["achieved"] = *achieved;
  return {{"verb", verb.empty() ? json(nullptr) : json(verb)}, {"tool_version", kToolVersion}, {"error", err}};
}

void emit(const json& report, const std::string& format, std::ostream& out) {
  out << (format == "md" ? report::render_markdown(report) : report::canonical_dump(report));
}

void add_table_options(CLI::App* cmd, TableOptions& t, bool smoothing) {
  cmd->add_option("input", t.input, "Counts as JSON table or CSV observation records")->required();
  cmd->add_option("--columns", t.columns, "CSV columns to cross-tabulate (default: all)")->delimiter(',');
  cmd->add_option("--levels", t.levels, "Declared level order for a CSV column, NAME=l1,l2,...");
  cmd->add_option("--weight", t.weight, "CSV column holding a frequency per row");
  if (smoothing)
    cmd->add_option("--smoothing", t.smoothing, "Additive smoothing λ applied before normalizing (0 = off)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  Options o;
  CLI::App app{"Simpson's paradox and collapsibility diagnostics", "simpcoll"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "md"}))->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Cross-tabulate CSV records into a counts table");
  add_table_options(ingest, o.table, false);

  auto* scan_cmd = app.add_subcommand("scan-paradox", "Look for an event-level reversal over each stratifier");
  add_table_options(scan_cmd, o.table, false);
  scan_cmd->add_option("--response", o.response, "Response event VARIABLE=LEVEL")->required();
  scan_cmd->add_option("--exposure", o.exposure, "Exposure event VARIABLE=LEVEL")->required();
  scan_cmd->add_option("--covariate", o.covariate, "Stratify by this variable only");
  scan_cmd->add_option("--confounder", o.confounder, "Confounder event for the Cornfield conditions");

  auto* dec_cmd = app.add_subcommand("decompose", "Saturated log-linear interaction terms");
  add_table_options(dec_cmd, o.table, true);
  dec_cmd->add_option("--tau-tol", o.tau_tol, "Zero threshold for interaction terms")->capture_default_str();

  auto* col_cmd = app.add_subcommand("collapse-check", "Collapsibility of an interaction term onto a margin");
  add_table_options(col_cmd, o.table, true);
  col_cmd->add_option("--target", o.target, "Interaction subset A (names or 1-based positions)")
      ->required()
      ->delimiter(',');
  col_cmd->add_option("--margin", o.margin, "Retained variables B ⊇ A")->required()->delimiter(',');
  col_cmd->add_flag("--strict", o.strict, "Strict collapsibility of A over the variables outside the margin");
  col_cmd->add_option("--tau-tol", o.tau_tol, "Tolerance on residuals and interaction terms")->capture_default_str();

  auto* assoc_cmd = app.add_subcommand("assoc-check", "Association reversal for R1-R4 relations");
  std::string joint_path;
  assoc_cmd->add_option("input", joint_path, "FiniteJoint JSON");
  assoc_cmd->add_option("--relation", o.relation, "r1, r2, r3, r4 or all")->capture_default_str();
  assoc_cmd->add_option("--relation-tol", o.relation_tol, "Tolerance on relation inequalities")->capture_default_str();
  assoc_cmd->add_option("--ci-tol", o.ci_tol, "Tolerance on conditional-independence checks")->capture_default_str();
  auto* linear_flag = assoc_cmd->add_flag("--linear", o.linear, "Linear-model R4 check from moments");
  for (auto [name, ptr] : std::initializer_list<std::pair<const char*, double*>>{{"--beta1", &o.beta1},
                                                                                  {"--beta2", &o.beta2},
                                                                                  {"--cov-xw", &o.cov_xw},
                                                                                  {"--var-x", &o.var_x},
                                                                                  {"--var-w", &o.var_w},
                                                                                  {"--var-eps", &o.var_eps}})
    assoc_cmd->add_option(name, *ptr)->needs(linear_flag)->capture_default_str();

  auto* reg_cmd = app.add_subcommand("regress-audit", "Collapsibility of stratified regression coefficients");
  std::string summary_path;
  auto* summary_opt = reg_cmd->add_option("input", summary_path, "Stratified summary JSON");
  auto* records_opt = reg_cmd->add_option("--records", o.records, "Raw records CSV with columns y,x,a");
  auto* joint_opt = reg_cmd->add_option("--joint", o.joint, "FiniteJoint JSON with A in the w slot");
  summary_opt->excludes(records_opt)->excludes(joint_opt);
  records_opt->excludes(joint_opt);
  reg_cmd->add_option("--tol", o.regress_tol, "Tolerance on collapsibility identities")->capture_default_str();

  auto* dep_cmd = app.add_subcommand("dep-check", "Homogeneity and average collapsibility of a dependence model");
  std::string model_path;
  dep_cmd->add_option("input", model_path, "Model JSON")->required();
  dep_cmd->add_option("--tol", o.dep_tol, "Tolerance on residuals over the grid")->capture_default_str();
  dep_cmd->add_option("--method", o.method, "Marginal derivative: closed-form or numeric")->capture_default_str();

  auto* surv_cmd = app.add_subcommand("survival-check", "Reversal conditions for the linear transformation model");
  std::string spec_path;
  surv_cmd->add_option("input", spec_path, "Spec JSON")->required();
  surv_cmd->add_flag("--flags-only", o.flags_only, "Evaluate the closed-form conditions only");
  surv_cmd->add_option("--trend-tol", o.trend_tol, "Flat-step threshold when classifying trends")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success&) {
    const char* help = "--help";
    const bool is_help = std::find(args.begin(), args.end(), std::string(help)) != args.end() ||
                         std::find(args.begin(), args.end(), std::string("-h")) != args.end();
    if (is_help) {
      const auto subs = app.get_subcommands();
      out << app.help(subs.empty() ? "" : subs.front()->get_name());
    } else {
      out << kToolVersion << "\n";
    }
    return kOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    emit(error_report(subs.empty() ? "" : subs.front()->get_name(), "usage", e.what()), o.format, out);
    return kInputError;
  }

  const CLI::App* cmd = app.get_subcommands().front();
  const std::string verb = cmd->get_name();
  try {
    Outcome outcome;
    std::string digest;
    if (verb == "assoc-check" && o.linear) {
      if (!joint_path.empty()) throw InputError("--linear takes no input file");
      const json params = {{"beta1", o.beta1}, {"beta2", o.beta2}, {"cov_xw", o.cov_xw},
                           {"var_x", o.var_x}, {"var_w", o.var_w}, {"var_eps", o.var_eps}};
      digest = io::sha256_hex(report::canonical_dump(params));
      outcome = do_assoc(nullptr, o);
    } else {
      std::string path = o.table.input;
      if (verb == "assoc-check") path = joint_path;
      if (verb == "regress-audit") path = !o.records.empty() ? o.records : !o.joint.empty() ? o.joint : summary_path;
      if (verb == "dep-check") path = model_path;
      if (verb == "survival-check") path = spec_path;
      if (path.empty()) throw InputError(verb + ": an input file is required");
      const Input in = load(path);
      digest = in.digest;
      if (verb == "ingest") outcome = do_ingest(in, o);
      else if (verb == "scan-paradox") outcome = do_scan(in, o);
      else if (verb == "decompose") outcome = do_decompose(in, o);
      else if (verb == "collapse-check") outcome = do_collapse(in, o);
      else if (verb == "assoc-check") outcome = do_assoc(&in, o);
      else if (verb == "regress-audit") outcome = do_regress(in, o);
      else if (verb == "dep-check") outcome = do_dep(in, o);
      else outcome = do_survival(in, o);
    }
    const json report = {
        {"verb", verb}, {"input_digest", digest}, {"tool_version", kToolVersion}, {"result", outcome.result}};
    emit(report, o.format, out);
    return outcome.code;
  } catch (const InputError& e) {
    emit(error_report(verb, "input", e.what()), o.format, out);
  } catch (const NumericalError& e) {
    emit(error_report(verb, "numerical", e.what(), e.achieved()), o.format, out);
  } catch (const ConsistencyError& e) {
    emit(error_report(verb, "consistency", e.what()), o.format, out);
  } catch (const json::exception& e) {
    emit(error_report(verb, "input", std::string("JSON: ") + e.what()), o.format, out);
  }
  return kInputError;
}

}  // namespace simpcoll::cli
