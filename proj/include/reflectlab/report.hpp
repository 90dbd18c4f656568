#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace reflectlab::cli {

using ParamValue = std::variant<double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

struct ScenarioConfig {
  std::string scenario;
  ParamMap parameters;
  std::uint64_t seed = 42;
  std::string output_path = "out";
};

/// Rectangular CSV data written next to the report.
struct CsvTable {
  std::string name;  // file name, e.g. "eigenvalues.csv"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct Report {
  std::string scenario;
  ParamMap parameters;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
  std::map<std::string, bool> verdicts;
  std::vector<std::string> artifacts;
  double runtime_ms = 0;  // written to timing.json, not report.json
  std::string tool_version;

  std::deque<CsvTable> tables;  // artifact contents, not serialized

  bool all_verdicts() const;
  /// Serialized fields only.
  bool same_content(const Report& other) const;
};

enum class EmitFormat { Json, CsvSummary };

/// Deterministic text of the report in the given format.
std::string serialize(const Report& report, EmitFormat format);
Report parse_report_json(const std::string& text);

/// Writes <dir>/report.json or <dir>/summary.csv. Throws IoError.
std::string emit(const Report& report, EmitFormat format, const std::string& dir);
/// report.json, summary.csv, every artifact table and timing.json.
void write_outputs(const Report& report, const std::string& dir);

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

/// Parses {"scenario", "parameters", "seed", "output_path"}; other keys are
/// taken as parameters. Schema validation happens in run().
ScenarioConfig parse_config_json(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

}  // namespace reflectlab::cli
