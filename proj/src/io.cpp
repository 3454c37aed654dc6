#include "simpcoll/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <openssl/evp.h>

#include "simpcoll/errors.hpp"

namespace simpcoll::io {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string("expected a number for '") + what + "'");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string("expected an array for '") + what + "'");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Eigen::VectorXd vector_of(const json& j, const char* what) {
  const auto v = numbers(j, what);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json array_of(const Eigen::ArrayXd& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(a(i));
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false, closed = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    closed = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
          closed = true;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty())
          throw InputError("CSV line " + std::to_string(line) + ": stray quote inside unquoted field");
        quoted = true;
        field_started = true;
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        throw InputError("CSV line " + std::to_string(line) + ": bare carriage return");
      case '\n':
        end_row();
        ++line;
        break;
      default:
        if (closed)
          throw InputError("CSV line " + std::to_string(line) + ": text after closing quote");
        field += c;
    }
  }
  if (quoted) throw InputError("CSV: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

ContingencyTable ingest_csv(std::string_view text, const CsvTableOptions& opts) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw InputError("empty CSV file");
  const auto& header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != header.size())
      throw InputError("ragged CSV: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                       " fields, header has " + std::to_string(header.size()));
  if (rows.size() == 1) throw InputError("CSV has a header but no observations");

  auto column = [&](const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw InputError("unknown CSV column '" + name + "'");
  };
  std::vector<std::size_t> cols;
  if (opts.columns.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (!opts.weight || header[k] != *opts.weight) cols.push_back(k);
  } else {
    for (const auto& name : opts.columns) cols.push_back(column(name));
  }
  if (cols.size() > static_cast<std::size_t>(VarSet::kMaxVariables))
    throw InputError("too many variables: " + std::to_string(cols.size()) + " > " +
                     std::to_string(VarSet::kMaxVariables));
  const std::optional<std::size_t> weight_col = opts.weight ? std::optional(column(*opts.weight)) : std::nullopt;
  for (const auto& [name, lv] : opts.levels) (void)column(name);

  // levels: declared, else first appearance
  std::vector<Variable> vars;
  std::vector<std::unordered_map<std::string, Eigen::Index>> lookup(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    Variable v{header[cols[k]], {}};
    if (auto it = opts.levels.find(v.name); it != opts.levels.end()) v.levels = it->second;
    for (std::size_t l = 0; l < v.levels.size(); ++l) lookup[k].emplace(v.levels[l], static_cast<Eigen::Index>(l));
    const bool declared = !v.levels.empty();
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& value = rows[r][cols[k]];
      if (lookup[k].count(value)) continue;
      if (declared) throw InputError("value '" + value + "' in column '" + v.name + "' is not a declared level");
      lookup[k].emplace(value, static_cast<Eigen::Index>(v.levels.size()));
      v.levels.push_back(value);
    }
    if (v.levels.size() < 2)
      throw InputError("column '" + v.name + "' has a single level; declare its levels to keep it");
    vars.push_back(std::move(v));
  }
  CategoricalScheme scheme(std::move(vars));

  Eigen::ArrayXd cells = Eigen::ArrayXd::Zero(scheme.cell_count());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < cols.size(); ++k)
      idx = idx * scheme.levels(static_cast<int>(k)) + lookup[k].at(rows[r][cols[k]]);
    double w = 1.0;
    if (weight_col) {
      const auto& s = rows[r][*weight_col];
      std::size_t used = 0;
      try {
        w = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != s.size() || !std::isfinite(w) || w < 0)
        throw InputError("row " + std::to_string(r + 1) + ": invalid weight '" + s + "'");
    }
    cells(idx) += w;
  }
  return ContingencyTable(std::move(scheme), std::move(cells), TableForm::counts);
}

ContingencyTable table_from_json(const json& j) {
  std::vector<Variable> vars;
  const auto& jv = require(j, "variables");
  if (!jv.is_array()) throw InputError("'variables' must be an array");
  for (const auto& v : jv) {
    Variable var;
    const auto& name = require(v, "name");
    if (!name.is_string()) throw InputError("variable name must be a string");
    var.name = name.get<std::string>();
    const auto& levels = require(v, "levels");
    if (!levels.is_array()) throw InputError("'levels' must be an array");
    for (const auto& l : levels) {
      if (!l.is_string()) throw InputError("level labels must be strings");
      var.levels.push_back(l.get<std::string>());
    }
    vars.push_back(std::move(var));
  }
  const auto& form = require(j, "form");
  TableForm f;
  if (form == "counts")
    f = TableForm::counts;
  else if (form == "probability")
    f = TableForm::probability;
  else
    throw InputError("'form' must be \"counts\" or \"probability\"");
  const auto cells = numbers(require(j, "cells"), "cells");
  return build_table(CategoricalScheme(std::move(vars)), cells, f);
}

json table_to_json(const ContingencyTable& table) {
  json vars = json::array();
  for (const auto& v : table.scheme().variables()) vars.push_back({{"name", v.name}, {"levels", v.levels}});
  return {{"variables", vars},
          {"form", table.is_probability() ? "probability" : "counts"},
          {"cells", array_of(table.cells())}};
}

json decomposition_to_json(const InteractionDecomposition& dec) {
  json subsets = json::array();
  for (VarSet z : dec.scheme().all().subsets())
    subsets.push_back({{"vars", dec.scheme().names(z)}, {"tau", array_of(dec.tau(z))}});
  return {{"subsets", subsets}};
}

FiniteJoint joint_from_json(const json& j) {
  const auto& levels = require(j, "levels");
  auto y = vector_of(require(levels, "y"), "levels.y");
  auto x = vector_of(require(levels, "x"), "levels.x");
  auto w = vector_of(require(levels, "w"), "levels.w");
  const auto p = numbers(require(j, "p"), "p");
  return FiniteJoint(std::move(y), std::move(x), std::move(w), p);
}

json joint_to_json(const FiniteJoint& joint) {
  auto vec = [](const Eigen::VectorXd& v) { return array_of(v.array()); };
  return {{"levels", {{"y", vec(joint.y())}, {"x", vec(joint.x())}, {"w", vec(joint.w())}}},
          {"p", array_of(joint.table().cells())}};
}

StratifiedRegressionSummary summary_from_json(const json& j) {
  const auto& levels = require(j, "levels");
  if (!levels.is_array()) throw InputError("'levels' must be an array");
  std::vector<StratumMoments> m;
  for (const auto& l : levels)
    m.push_back({number(require(l, "pi"), "pi"), number(require(l, "alpha"), "alpha"),
                 number(require(l, "beta"), "beta"), number(require(l, "mu_x"), "mu_x"),
                 number(require(l, "s_xx"), "s_xx"), number(require(l, "s_yy"), "s_yy")});
  return StratifiedRegressionSummary(m);
}

json summary_to_json(const StratifiedRegressionSummary& s) {
  json levels = json::array();
  for (const auto& m : s.moments())
    levels.push_back({{"pi", m.pi},
                      {"alpha", m.alpha},
                      {"beta", m.beta},
                      {"mu_x", m.mu_x},
                      {"s_xx", m.s_xx},
                      {"s_yy", m.s_yy}});
  return {{"levels", levels}};
}

std::vector<Record> records_from_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.size() < 2) throw InputError("records CSV needs a header and at least one row");
  const auto& header = rows.front();
  auto column = [&](const char* name) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw InputError(std::string("records CSV lacks column '") + name + "'");
  };
  const std::size_t cy = column("y"), cx = column("x"), ca = column("a");
  auto parse = [](const std::string& s, std::size_t row) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
      throw InputError("row " + std::to_string(row + 1) + ": '" + s + "' is not a finite number");
    return v;
  };
  std::vector<Record> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) throw InputError("ragged CSV at row " + std::to_string(r + 1));
    out.push_back({parse(rows[r][cy], r), parse(rows[r][cx], r), rows[r][ca]});
  }
  return out;
}

DependenceModel model_from_json(const json& j) {
  const auto& family = require(j, "family");
  DependenceModel model;
  if (family == "gaussian-linear-interaction") {
    const auto alpha = numbers(require(j, "alpha"), "alpha");
    if (alpha.size() != 3) throw InputError("'alpha' must hold three coefficients");
    GaussianInteraction g;
    g.alpha1 = alpha[0];
    g.alpha2 = alpha[1];
    g.alpha3 = alpha[2];
    g.sigma = number(require(j, "sigma"), "sigma");
    if (j.contains("w_law")) {
      const auto& law = j.at("w_law");
      if (require(law, "type") != "normal") throw InputError("only a normal W law is supported");
      if (law.contains("mean_slope")) g.w_mean_slope = number(law.at("mean_slope"), "mean_slope");
    }
    model = g;
  } else if (family == "uniform-quadratic") {
    model = UniformQuadratic{};
  } else {
    throw InputError("unknown dependence family " + family.dump());
  }
  validate(model);
  return model;
}

json model_to_json(const DependenceModel& model) {
  if (const auto* g = std::get_if<GaussianInteraction>(&model))
    return {{"family", family_name(model)},
            {"alpha", {g->alpha1, g->alpha2, g->alpha3}},
            {"sigma", g->sigma},
            {"w_law", {{"type", "normal"}, {"mean_slope", g->w_mean_slope}}}};
  return {{"family", family_name(model)}};
}

SurvivalSpec spec_from_json(const json& j) {
  SurvivalSpec s;
  s.beta_x = number(require(j, "beta_x"), "beta_x");
  s.beta_y = number(require(j, "beta_y"), "beta_y");
  if (j.contains("eta")) {
    const auto& eta = j.at("eta");
    s.mu = number(require(eta, "mu"), "eta.mu");
    s.rho = number(require(eta, "rho"), "eta.rho");
  }
  if (j.contains("w_law")) {
    if (!j.at("w_law").is_string()) throw InputError("'w_law' must be a string");
    s.w_law = parse_w_law(j.at("w_law").get<std::string>());
  }
  if (j.contains("v_law") && j.at("v_law") != "std-normal") throw InputError("only a std-normal V law is supported");
  if (j.contains("k")) {
    const auto& k = j.at("k");
    s.k = TabulatedTransform(numbers(require(k, "t"), "k.t"), numbers(require(k, "k"), "k.k"));
  }
  validate(s);
  return s;
}

json spec_to_json(const SurvivalSpec& spec) {
  json j = {{"beta_x", spec.beta_x},
            {"beta_y", spec.beta_y},
            {"eta", {{"mu", spec.mu}, {"rho", spec.rho}}},
            {"w_law", to_string(spec.w_law)},
            {"v_law", "std-normal"}};
  if (spec.k) j["k"] = {{"t", spec.k->knots()}, {"k", spec.k->values()}};
  return j;
}

}  // namespace simpcoll::io
