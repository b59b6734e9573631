#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vrank/model.hpp"

namespace vrank {

/// Command templates are shell commands with placeholders substituted per
/// simulation (values are shell-quoted):
///   {candidate}  candidate source file      {testbench}  testbench file
///   {binary}     compiled simulation output {workdir}    scratch directory
///   {role}       "trace" or "judge"
/// An empty compile template skips the compile step.
struct SimulatorConfig {
  std::string compile_command_template;
  std::string run_command_template;
  std::chrono::milliseconds timeout{10'000};          // run step
  std::chrono::milliseconds compile_timeout{120'000}; // compile step
  std::filesystem::path scratch_root;  // empty: system temp directory
  bool keep_failed = false;            // retain scratch dirs of non-ok runs
  int max_parallel_simulations = 1;

  void validate() const;
};

SimulatorConfig iverilog_simulator();
SimulatorConfig verilator_simulator();

/// Table-driven stand-in: `mocksim_path` is the vrank-mocksim executable,
/// `table` its digest-keyed outcome table.
SimulatorConfig mock_simulator(const std::filesystem::path& mocksim_path,
                               const std::filesystem::path& table);

/// Canonical form of one output line: trimmed, whitespace runs collapsed to a
/// single space, and the value half of every `name=value` token lowercased.
/// Idempotent.
std::string normalize_record(const std::string& line);

/// Parses simulator stdout into a trace. Non-marker lines are dropped. Any
/// missing, duplicate or out-of-range case index gives malformed_output.
ExecutionTrace parse_trace(const std::string& stdout_text, const Testbench& testbench);

/// Splits a normalized record into its `name=value` fields.
std::map<std::string, std::string> record_fields(const std::string& record);

/// Canonical hexadecimal form of a signal value for cross-format comparison:
/// lowercase, underscores and `0x`/sized-literal prefixes removed, binary and
/// decimal literals converted, leading zeros stripped.
std::string canonical_value(const std::string& value);

enum class SimRole { trace, judge };

struct SimulationOutcome {
  bool compiled = false;
  bool exited_cleanly = false;  // run exited 0 within the timeout
  bool timed_out = false;
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Compiles and runs `source` against `testbench_source` in an isolated
/// scratch directory.
SimulationOutcome simulate(const std::string& source, const std::string& testbench_source,
                           const SimulatorConfig& cfg, SimRole role);

ExecutionTrace run_candidate(const Candidate& candidate, const Testbench& testbench,
                             const SimulatorConfig& cfg);

/// Traces aligned with candidate order; independent of parallelism.
std::vector<ExecutionTrace> run_all(const std::vector<Candidate>& candidates,
                                    const Testbench& testbench, const SimulatorConfig& cfg);

}  // namespace vrank
