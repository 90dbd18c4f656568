#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reflectlab/errors.hpp"
#include "reflectlab/report.hpp"
#include "reflectlab/scenarios.hpp"

namespace rc = reflectlab::cli;

namespace {

rc::ScenarioConfig config_from_args(const std::string& config_path, const std::string& scenario,
                                    const std::vector<std::string>& params, long long seed,
                                    const std::string& output) {
  rc::ScenarioConfig config;
  if (!config_path.empty()) {
    if (!scenario.empty()) throw reflectlab::ConfigError("give either a scenario or --config");
    config = rc::parse_config_file(config_path);
  } else {
    if (scenario.empty()) throw reflectlab::ConfigError("missing scenario name");
    config.scenario = scenario;
  }
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw reflectlab::ConfigError("--param expects key=value, got '" + kv + "'");
    }
    // validate() converts to the declared type
    config.parameters[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (!output.empty()) config.output_path = output;
  return config;
}

void print_summary(const rc::Report& report, const std::string& dir) {
  std::cout << report.scenario << " -> " << dir << "\n";
  for (const auto& [name, ok] : report.verdicts) {
    std::cout << "  " << (ok ? "PASS " : "FAIL ") << name << "\n";
  }
  std::cout << "  runtime_ms " << rc::format_number(report.runtime_ms) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reflectlab: numerical experiments on reflection positivity"};
  app.set_version_flag("--version", std::string(REFLECTLAB_VERSION));
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List scenarios and their parameters");

  auto* run = app.add_subcommand("run", "Run a scenario");
  std::string scenario, config_path, output;
  std::vector<std::string> params;
  long long seed = -1;
  bool quiet = false;
  run->add_option("scenario", scenario, "Scenario name");
  run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--param,-p", params, "Parameter as key=value (repeatable)");
  run->add_option("--seed", seed, "Random seed")->check(CLI::NonNegativeNumber);
  run->add_option("--output,-o", output, "Output directory");
  run->add_flag("--quiet,-q", quiet, "Only write files");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& info : rc::scenarios()) {
      std::cout << info.name << "  " << info.summary << "\n";
      for (const auto& p : info.schema) {
        const std::string def = std::holds_alternative<double>(p.default_value)
                                    ? rc::format_number(std::get<double>(p.default_value))
                                    : "\"" + std::get<std::string>(p.default_value) + "\"";
        std::cout << "    " << p.name << " = " << def << "  " << p.help << "\n";
      }
    }
    return 0;
  }

  try {
    const auto config = config_from_args(config_path, scenario, params, seed, output);
    const auto report = rc::run(config);
    rc::write_outputs(report, config.output_path);
    if (!quiet) print_summary(report, config.output_path);
    return report.all_verdicts() ? 0 : 1;
  } catch (const reflectlab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const reflectlab::Error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}
