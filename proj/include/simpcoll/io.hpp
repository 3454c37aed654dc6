#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simpcoll/assoc.hpp"
#include "simpcoll/depfun.hpp"
#include "simpcoll/loglinear.hpp"
#include "simpcoll/regress.hpp"
#include "simpcoll/survival.hpp"
#include "simpcoll/table.hpp"

namespace simpcoll::io {

using json = nlohmann::json;

std::string read_file(const std::string& path);
/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// RFC 4180 subset: comma separator, double-quoted fields with "" escapes,
/// LF or CRLF line ends. A trailing newline does not start a new record.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

struct CsvTableOptions {
  /// Columns to cross-tabulate, in this order; empty means every column.
  std::vector<std::string> columns;
  /// Full level lists for columns whose observed levels may be incomplete.
  std::map<std::string, std::vector<std::string>> levels;
  /// Optional column holding a nonnegative frequency per row.
  std::optional<std::string> weight;
};

/// Counts table from observation rows. Levels are the distinct values of each
/// column in first-appearance order, unless declared in `opts.levels`.
ContingencyTable ingest_csv(std::string_view text, const CsvTableOptions& opts = {});

ContingencyTable table_from_json(const json& j);
json table_to_json(const ContingencyTable& table);

json decomposition_to_json(const InteractionDecomposition& dec);

/// {"levels":{"y":[...],"x":[...],"w":[...]},"p":[...]}
FiniteJoint joint_from_json(const json& j);
json joint_to_json(const FiniteJoint& joint);

/// {"levels":[{"pi":..,"alpha":..,"beta":..,"mu_x":..,"s_xx":..,"s_yy":..}, ...]}
StratifiedRegressionSummary summary_from_json(const json& j);
json summary_to_json(const StratifiedRegressionSummary& s);

/// Raw records with header columns y, x, a (any order, extra columns ignored).
std::vector<Record> records_from_csv(std::string_view text);

DependenceModel model_from_json(const json& j);
json model_to_json(const DependenceModel& model);

SurvivalSpec spec_from_json(const json& j);
json spec_to_json(const SurvivalSpec& spec);

}  // namespace simpcoll::io
