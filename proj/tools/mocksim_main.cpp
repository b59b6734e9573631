// Table-driven simulator stand-in used by tests, demos and the synthetic
// benchmark. Outcomes are looked up by the SHA-256 of the candidate source.
//
// Table entry fields (all optional):
//   compile_exit  exit status of `compile` (default 0)
//   stdout        text printed by `run --role trace`
//   exit_code     exit status of `run --role trace` (default 0)
//   sleep_ms      delay before `run` produces output
//   correct       judge role verdict, printed as a pass or mismatch line
//   judge         {stdout, exit_code} printed verbatim in judge role
#include <chrono>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "vrank/digest.hpp"
#include "vrank/error.hpp"
#include "vrank/json_io.hpp"

namespace {

std::optional<vrank::json> lookup(const std::string& table_path, const std::string& candidate_path) {
  const auto table = vrank::read_json_file(table_path);
  const auto digest = vrank::sha256_hex(vrank::read_file(candidate_path));
  if (auto it = table.find(digest); it != table.end()) return std::optional<vrank::json>(std::in_place, *it);
  return std::nullopt;
}

int compile(const std::string& table, const std::string& candidate) {
  const auto entry = lookup(table, candidate);
  if (!entry) {
    std::cerr << candidate << ": syntax error (unknown candidate)\n";
    return 1;
  }
  const int status = entry->value("compile_exit", 0);
  if (status != 0) std::cerr << candidate << ": compile failed\n";
  return status;
}

int run(const std::string& table, const std::string& role, const std::string& candidate) {
  const auto entry = lookup(table, candidate);
  if (!entry) {
    std::cerr << "unknown candidate\n";
    return 2;
  }
  if (int ms = entry->value("sleep_ms", 0); ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));

  if (role == "judge") {
    if (auto it = entry->find("judge"); it != entry->end()) {
      std::cout << it->value("stdout", std::string());
      return it->value("exit_code", 0);
    }
    if (entry->value("correct", false)) {
      std::cout << "Mismatches: 0 in 20 samples\n";
    } else {
      std::cout << "Hint: Output 'out' has 3 mismatches.\nMismatches: 3 in 20 samples\n";
    }
    return 0;
  }
  std::cout << entry->value("stdout", std::string());
  std::cout.flush();
  return entry->value("exit_code", 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vrank-mocksim: table-driven simulator stand-in"};
  app.require_subcommand(1);
  std::string table, candidate, testbench, role = "trace";

  auto* compile_cmd = app.add_subcommand("compile", "check that the candidate is in the table");
  compile_cmd->add_option("--table", table)->required();
  compile_cmd->add_option("--candidate", candidate)->required();

  auto* run_cmd = app.add_subcommand("run", "print the tabled simulation output");
  run_cmd->add_option("--table", table)->required();
  run_cmd->add_option("--candidate", candidate)->required();
  run_cmd->add_option("--testbench", testbench);
  run_cmd->add_option("--role", role)->check(CLI::IsMember({"trace", "judge"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*compile_cmd) return compile(table, candidate);
    return run(table, role, candidate);
  } catch (const vrank::Error& e) {
    std::cerr << "vrank-mocksim: " << e.what() << "\n";
    return 3;
  }
}
