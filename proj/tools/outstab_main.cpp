#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "outstab/errors.hpp"
#include "outstab/io.hpp"
#include "outstab/shell.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw outstab::ConfigInvalid("cannot open config file: " + path);
  try {
    nlohmann::json j;
    is >> j;
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw outstab::ConfigInvalid(std::string("config parse error: ") + e.what());
  }
}

void print_catalog(const nlohmann::json& catalog) {
  for (const auto& entry : catalog) {
    std::cout << entry["id"].get<std::string>() << "  (state " << entry["dim_state"].get<int>()
              << ", disturbance " << entry["dim_disturbance"].get<int>() << ", output "
              << entry["dim_output"].get<int>() << ")\n";
    std::cout << "  " << entry["description"].get<std::string>() << "\n";
    for (const auto& [name, meaning] : entry["params"].items())
      std::cout << "    " << name << ": " << meaning.get<std::string>() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation, certification and probing of output-stable systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<int> jobs;
  bool systems_json = false;

  const std::vector<std::pair<std::string, std::string>> pipeline = {
      {"simulate", "integrate a system under a disturbance signal"},
      {"certify", "check a certificate theorem on a sampled domain"},
      {"bound", "compute a convergence-time bound"},
      {"probe", "run a uniformity, falsification or integral probe"},
      {"dads", "run the adaptive-controller property suite"},
  };
  for (const auto& [name, help] : pipeline) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "path to the run config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory for reports and the manifest")
        ->required();
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--format", format, "artifact format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", jobs, "worker cap (0 = auto)");
  }
  auto* systems = app.add_subcommand("systems", "list built-in systems");
  systems->add_flag("--json", systems_json, "machine-readable catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return outstab::shell::kExitConfigInvalid;
  }

  try {
    if (systems->parsed()) {
      const auto catalog = outstab::shell::catalog_json();
      if (systems_json)
        std::cout << outstab::io::dump_json_17(catalog);
      else
        print_catalog(catalog);
      return outstab::shell::kExitOk;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    outstab::shell::RunOverrides overrides;
    overrides.seed = seed;
    overrides.format = format;
    overrides.jobs = jobs;
    const auto result = outstab::shell::run(sub, load_config(config_path), out_dir, overrides);
    return result.exit_code;
  } catch (const outstab::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return outstab::shell::kExitConfigInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return outstab::shell::kExitRuntimeFailure;
  }
}
