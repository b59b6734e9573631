#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "vrank/gateway.hpp"
#include "vrank/model.hpp"
#include "vrank/simulation.hpp"

namespace vrank {

enum class SimulatorKind { mock, iverilog, verilator, custom };
SimulatorKind simulator_kind_from_string(const std::string& text);

/// Simulator selection before it is turned into command templates.
struct SimulatorSettings {
  SimulatorKind kind = SimulatorKind::iverilog;
  std::string compile_command;  // custom only
  std::string run_command;      // custom only
  std::filesystem::path mocksim;
  std::filesystem::path table;
  std::chrono::milliseconds timeout{10'000};
  std::chrono::milliseconds compile_timeout{120'000};
  std::filesystem::path scratch_root;
  bool keep_failed = false;
  int max_parallel = 1;

  SimulatorConfig build() const;
};

/// Everything a CLI invocation needs. Loaded from a JSON file, then
/// overridden field by field from flags.
struct AppConfig {
  ProviderConfig provider;
  SimulatorSettings simulator;
  RunParams run;
  std::optional<std::filesystem::path> prompts_dir;
  std::filesystem::path runs_dir = "runs";
  int repetitions = 1;
  int max_parallel_problems = 1;

  PromptTemplates templates() const;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// Throws Error{invalid_config} on unknown enum values or wrong types.
AppConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Throws Error{config_error} when the file is missing or not valid JSON.
AppConfig load_config(const std::filesystem::path& path);

}  // namespace vrank
