#include <doctest.h>

#include "vrank/error.hpp"
#include "vrank/config.hpp"
#include "vrank/json_io.hpp"
#include "vrank/subprocess.hpp"

using namespace vrank;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

const fs::path kData = VRANK_DATA_DIR;

ProcessResult cli(const std::string& args) {
  return run_shell(shell_quote(VRANK_CLI) + " " + args, fs::temp_directory_path(), 60s);
}

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("vrank-test-cli-" + name);
  fs::remove_all(p);
  return p;
}

std::string demo_args() {
  return shell_quote((kData / "demo" / "problem.json").string()) + " --config " +
         shell_quote((kData / "demo" / "config.json").string()) + " --mocksim " + shell_quote(VRANK_MOCKSIM);
}

}  // namespace

TEST_CASE("config files resolve paths against their own directory") {
  const auto cfg = load_config(kData / "demo" / "config.json");
  CHECK(cfg.provider.provider == ProviderKind::mock);
  CHECK(cfg.provider.mock_script == (kData / "demo" / "mock_script.json").lexically_normal());
  CHECK(cfg.simulator.kind == SimulatorKind::mock);
  CHECK(cfg.run.m_min == 4);
  CHECK(cfg.run.cot.x == 5);
}

TEST_CASE("config errors") {
  try {
    load_config("/nonexistent/vrank.json");
    FAIL("expected config_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_error);
  }
  CHECK_THROWS_AS(parse_config(json::parse(R"({"simulator": {"kind": "spice"}})"), {}), Error);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"provider": {"kind": "carrier-pigeon"}})"), {}), Error);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"run": {"loss": "fuzzy"}})"), {}), Error);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"run": {"n": "ten"}})"), {}), Error);
  CHECK_THROWS_AS(parse_config(json::parse("[]"), {}), Error);
}

TEST_CASE("simulator settings build the matching profile") {
  SimulatorSettings s;
  s.kind = SimulatorKind::iverilog;
  CHECK(s.build().run_command_template.find("vvp") == 0);
  s.kind = SimulatorKind::custom;
  CHECK_THROWS_AS(s.build(), Error);
  s.run_command = "sim {candidate} {testbench}";
  s.timeout = std::chrono::milliseconds(1234);
  CHECK(s.build().timeout.count() == 1234);
  s.kind = SimulatorKind::mock;
  CHECK_THROWS_AS(s.build(), Error);
}

TEST_CASE("missing config file exits nonzero with config_error") {
  const auto r = cli("rank " + shell_quote((kData / "demo" / "problem.json").string()) + " --config /nope.json");
  CHECK(r.exited);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("config_error") != std::string::npos);
}

TEST_CASE("rank writes the artifact layout and prints the ranking") {
  const auto dir = fresh_dir("rank");
  const auto r = cli("rank " + demo_args() + " --run-dir " + shell_quote(dir.string()));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("1     5         5     0,2,5,6,9") != std::string::npos);
  CHECK(r.out.find("selected: " + (dir / "candidates" / "cand_000.v").string()) != std::string::npos);
  CHECK(fs::exists(dir / "testbench.v"));
  CHECK(fs::exists(dir / "traces.jsonl"));
  CHECK(fs::exists(dir / "candidates" / "cand_009.v"));
  const auto report = parse_report(read_file(dir / "report.json"));
  CHECK(report.final_ranking.front() == 0);
}

TEST_CASE("flags override the config file") {
  const auto dir = fresh_dir("override");
  const auto r = cli("rank " + demo_args() + " --no-cot --loss case --run-dir " + shell_quote(dir.string()));
  REQUIRE(r.exit_code == 0);
  const auto report = parse_report(read_file(dir / "report.json"));
  CHECK_FALSE(report.params.cot.enabled);
  CHECK(report.params.loss == LossKind::case_wise);
  CHECK(report.cot_decisions.empty());
}

TEST_CASE("runs without --run-dir get fresh timestamped directories") {
  const auto root = fresh_dir("runs");
  const auto args = "rank " + demo_args() + " --runs-dir " + shell_quote(root.string());
  REQUIRE(cli(args).exit_code == 0);
  REQUIRE(cli(args).exit_code == 0);
  int runs = 0;
  for (const auto& entry : fs::directory_iterator(root / "demo_adder")) runs += fs::exists(entry.path() / "report.json");
  CHECK(runs == 2);
}

TEST_CASE("generate then resolve on the saved report") {
  const auto dir = fresh_dir("staged");
  auto g = cli("generate " + demo_args() + " --run-dir " + shell_quote(dir.string()));
  REQUIRE(g.exit_code == 0);
  auto partial = parse_report(read_file(dir / "report.json"));
  CHECK(partial.traces.empty());
  CHECK(partial.candidates.size() == 10);

  // arbitration consumes a fresh copy of the script's reasoning turns
  auto res = cli("resolve " + demo_args() + " --report " + shell_quote((dir / "report.json").string()) +
                 " --sim-table " + shell_quote((kData / "demo" / "sim_table.json").string()) + " --cot-th 40");
  REQUIRE(res.exit_code == 0);
  const auto done = parse_report(read_file(dir / "report.json"));
  CHECK(done.traces.size() == 10);
  REQUIRE(done.cot_decisions.size() == 1);
  CHECK(done.cot_decisions[0].swap);
  CHECK(done.final_ranking.front() == 1);
}

TEST_CASE("eval prints the benchmark table") {
  const auto dir = fresh_dir("eval");
  const auto r = cli("eval " + shell_quote((kData / "bench" / "manifest.jsonl").string()) + " --config " +
                     shell_quote((kData / "bench" / "config.json").string()) + " --mocksim " +
                     shell_quote(VRANK_MOCKSIM) + " --run-dir " + shell_quote(dir.string()));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("max8") != std::string::npos);
  CHECK(fs::exists(dir / "benchmark.json"));
  CHECK(fs::exists(dir / "max8" / "rep-0" / "report.json"));
}
