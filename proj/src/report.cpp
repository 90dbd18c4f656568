#include "reflectlab/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "reflectlab/errors.hpp"

namespace reflectlab::cli {

using nlohmann::json;

bool Report::all_verdicts() const {
  for (const auto& [name, ok] : verdicts) {
    if (!ok) return false;
  }
  return true;
}

namespace {

bool same_number(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

json param_to_json(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
    os << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

bool Report::same_content(const Report& o) const {
  if (scenario != o.scenario || parameters != o.parameters || seed != o.seed ||
      verdicts != o.verdicts || artifacts != o.artifacts || tool_version != o.tool_version ||
      metrics.size() != o.metrics.size()) {
    return false;
  }
  for (auto a = metrics.begin(), b = o.metrics.begin(); a != metrics.end(); ++a, ++b) {
    if (a->first != b->first || !same_number(a->second, b->second)) return false;
  }
  return true;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string serialize(const Report& r, EmitFormat format) {
  if (format == EmitFormat::CsvSummary) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, value] : r.metrics) rows.push_back({name, format_number(value)});
    return csv_text({"metric", "value"}, rows);
  }
  json j;
  j["scenario"] = r.scenario;
  j["parameters"] = json::object();
  for (const auto& [k, v] : r.parameters) j["parameters"][k] = param_to_json(v);
  j["seed"] = r.seed;
  j["metrics"] = json::object();
  for (const auto& [k, v] : r.metrics) {
    j["metrics"][k] = std::isfinite(v) ? json(v) : json(format_number(v));
  }
  j["verdicts"] = json::object();
  for (const auto& [k, v] : r.verdicts) j["verdicts"][k] = v;
  j["artifacts"] = r.artifacts;
  j["tool_version"] = r.tool_version;
  return j.dump(2) + "\n";
}

Report parse_report_json(const std::string& text) {
  Report r;
  try {
    const json j = json::parse(text);
    r.scenario = j.at("scenario").get<std::string>();
    for (const auto& [k, v] : j.at("parameters").items()) {
      if (v.is_number()) {
        r.parameters[k] = v.get<double>();
      } else {
        r.parameters[k] = v.get<std::string>();
      }
    }
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("metrics").items()) {
      if (v.is_number()) {
        r.metrics[k] = v.get<double>();
      } else {
        const auto s = v.get<std::string>();
        r.metrics[k] = s == "nan"   ? std::numeric_limits<double>::quiet_NaN()
                       : s == "inf" ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity();
      }
    }
    for (const auto& [k, v] : j.at("verdicts").items()) r.verdicts[k] = v.get<bool>();
    r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    r.tool_version = j.at("tool_version").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string emit(const Report& report, EmitFormat format, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const fs::path path =
      fs::path(dir) / (format == EmitFormat::Json ? "report.json" : "summary.csv");
  write_file(path, serialize(report, format));
  return path.string();
}

void write_outputs(const Report& report, const std::string& dir) {
  namespace fs = std::filesystem;
  emit(report, EmitFormat::Json, dir);
  emit(report, EmitFormat::CsvSummary, dir);
  for (const auto& t : report.tables) write_file(fs::path(dir) / t.name, csv_text(t.header, t.rows));
  json timing;
  timing["runtime_ms"] = report.runtime_ms;
  write_file(fs::path(dir) / "timing.json", timing.dump(2) + "\n");
}

ScenarioConfig parse_config_json(const std::string& text) {
  ScenarioConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto add_param = [&](const std::string& k, const json& v) {
    if (v.is_number()) {
      c.parameters[k] = v.get<double>();
    } else if (v.is_string()) {
      c.parameters[k] = v.get<std::string>();
    } else {
      throw ConfigError("parameter '" + k + "' must be a number or a string");
    }
  };
  for (const auto& [k, v] : j.items()) {
    if (k == "scenario") {
      if (!v.is_string()) throw ConfigError("'scenario' must be a string");
      c.scenario = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("'seed' must be a non-negative integer");
      }
      c.seed = v.get<std::uint64_t>();
    } else if (k == "output_path") {
      if (!v.is_string()) throw ConfigError("'output_path' must be a string");
      c.output_path = v.get<std::string>();
    } else if (k == "parameters") {
      if (!v.is_object()) throw ConfigError("'parameters' must be an object");
      for (const auto& [pk, pv] : v.items()) add_param(pk, pv);
    } else {
      add_param(k, v);
    }
  }
  if (c.scenario.empty()) throw ConfigError("config is missing 'scenario'");
  return c;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

}  // namespace reflectlab::cli
