#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include <doctest.h>

#include "reflectlab/errors.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/report.hpp"
#include "reflectlab/scenarios.hpp"

using namespace reflectlab;
using namespace reflectlab::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Report sample_report() {
  Report r;
  r.scenario = "demo";
  r.parameters = {{"s", 0.5}, {"list", std::string("1,2")}};
  r.seed = 7;
  r.metrics = {{"a", 1.0 / 3.0}, {"b", -0.0}, {"c", std::numeric_limits<double>::quiet_NaN()},
               {"d", std::numeric_limits<double>::infinity()}, {"e", 1e-300}};
  r.verdicts = {{"ok", true}, {"bad", false}};
  r.artifacts = {"t.csv"};
  r.tool_version = "test";
  r.runtime_ms = 12.5;
  return r;
}

ScenarioConfig config(const std::string& name) {
  ScenarioConfig c;
  c.scenario = name;
  return c;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.0, 5e-324}) {
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("report serialization") {
  const Report r = sample_report();
  const std::string json = serialize(r, EmitFormat::Json);
  CHECK(json == serialize(r, EmitFormat::Json));
  CHECK(json.find("runtime_ms") == std::string::npos);
  const Report back = parse_report_json(json);
  CHECK(back.same_content(r));
  CHECK(std::isnan(back.metrics.at("c")));
  CHECK(std::isinf(back.metrics.at("d")));
  CHECK(serialize(back, EmitFormat::Json) == json);
  CHECK_FALSE(r.all_verdicts());
  CHECK_THROWS_AS(parse_report_json("{not json"), IoError);

  const std::string csv = serialize(r, EmitFormat::CsvSummary);
  CHECK(csv.rfind("metric,value\n", 0) == 0);
  CHECK(csv.find("a,0.3333333333333333") != std::string::npos);

  Report empty;
  empty.scenario = "x";
  CHECK(serialize(empty, EmitFormat::CsvSummary) == "metric,value\n");
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "reflectlab_report_test";
  std::filesystem::remove_all(dir);
  Report r = sample_report();
  r.tables.push_back({"t.csv", {"x", "label"}, {{"1", "plain"}, {"2", "has,comma"}}});
  write_outputs(r, dir.string());
  for (const char* f : {"report.json", "summary.csv", "t.csv", "timing.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(slurp(dir / "report.json") == serialize(r, EmitFormat::Json));
  CHECK(slurp(dir / "t.csv") == "x,label\n1,plain\n2,\"has,comma\"\n");
  CHECK(slurp(dir / "timing.json").find("12.5") != std::string::npos);
  CHECK(emit(r, EmitFormat::CsvSummary, (dir / "nested").string()) == (dir / "nested" / "summary.csv").string());
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing") {
  const auto nested = parse_config_json(R"({"scenario":"sl2-positivity","parameters":{"s":0.25},"seed":3})");
  const auto flat = parse_config_json(R"({"scenario":"sl2-positivity","s":0.25,"seed":3})");
  CHECK(nested.scenario == flat.scenario);
  CHECK(nested.parameters == flat.parameters);
  CHECK(nested.seed == 3);
  CHECK(parse_config_json(R"({"scenario":"x","output_path":"dir"})").output_path == "dir");
  CHECK_THROWS_AS(parse_config_json(R"({"s":0.25})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"scenario":"x","seed":-1})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"scenario":"x","s":[1,2]})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config.json"), Error);
}

TEST_CASE("schema validation") {
  CHECK(scenarios().size() == 13);
  std::set<std::string> names;
  for (const auto& s : scenarios()) names.insert(s.name);
  CHECK(names.size() == scenarios().size());
  CHECK_THROWS_AS(scenario_info("no-such-scenario"), ConfigError);

  auto c = config("sl2-positivity");
  const auto v = validate(c);
  CHECK(std::get<double>(v.parameters.at("s")) == 0.5);
  CHECK(std::get<double>(v.parameters.at("bumps")) == 12);
  c.parameters["s"] = std::string("0.25");
  CHECK(std::get<double>(validate(c).parameters.at("s")) == 0.25);
  c.parameters["s"] = std::string("abc");
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.parameters = {{"unknown", 1.0}};
  CHECK_THROWS_AS(validate(c), ConfigError);
  auto list = config("sl2-dual-spectrum");
  list.parameters["s_values"] = 0.5;
  CHECK(std::get<std::string>(validate(list).parameters.at("s_values")) == "0.5");
  auto fractional = config("cayley-table");
  fractional.parameters["n_max"] = 2.5;
  CHECK_THROWS_AS(run(fractional), ConfigError);
}

TEST_CASE("run wraps module errors") {
  auto c = config("sl2-positivity");
  c.parameters["order"] = 0.0;
  CHECK_THROWS_AS(run(c), ScenarioError);
  try {
    run(c);
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("sl2-positivity") != std::string::npos);
  }
  CHECK_THROWS_AS(run(config("nope")), ConfigError);
}

TEST_CASE("reports are deterministic across reruns and thread counts") {
  for (const char* name : {"cayley-table", "phillips", "kernels-bergman", "axb-qfield", "sl2-positivity"}) {
    auto c = config(name);
    c.seed = 11;
    set_thread_count(1);
    const Report one = run(c);
    set_thread_count(4);
    const Report four = run(c);
    const Report again = run(c);
    set_thread_count(0);
    CHECK_MESSAGE(serialize(one, EmitFormat::Json) == serialize(four, EmitFormat::Json), name);
    CHECK(serialize(four, EmitFormat::Json) == serialize(again, EmitFormat::Json));
    CHECK(one.all_verdicts());
    CHECK(one.tool_version == four.tool_version);
  }
  auto a = config("heisenberg-uncorrelate");
  a.parameters["models"] = 3.0;
  auto b = a;
  b.seed = a.seed + 1;
  CHECK(serialize(run(a), EmitFormat::Json) != serialize(run(b), EmitFormat::Json));
}
