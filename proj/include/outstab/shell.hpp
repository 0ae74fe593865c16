#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace outstab::shell {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes of the run pipeline.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitRuntimeFailure = 3;

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level();  // from OUTSTAB_LOG, default warn
void log(LogLevel level, const std::string& msg);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;  // "csv" | "json"
  std::optional<int> jobs;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> artifacts;  // file names inside out_dir
  nlohmann::json manifest;
};

// Validates the config for the given subcommand; throws ConfigInvalid with a
// path to the offending key. Unknown keys are rejected.
void validate_config(const std::string& subcommand, const nlohmann::json& config);

// Executes one subcommand: simulate | certify | bound | probe | dads.
// Artifacts and a manifest land in out_dir. Config errors surface before any
// artifact is written.
RunResult run(const std::string& subcommand, const nlohmann::json& config,
              const std::string& out_dir, const RunOverrides& overrides = {});

nlohmann::json catalog_json();

}  // namespace outstab::shell
