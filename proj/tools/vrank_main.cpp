#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vrank/config.hpp"
#include "vrank/evaluation.hpp"
#include "vrank/json_io.hpp"
#include "vrank/pipeline.hpp"

namespace fs = std::filesystem;
using namespace vrank;

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> provider;
  std::optional<std::string> model;
  std::optional<std::string> endpoint;
  std::optional<double> temperature;
  std::optional<std::string> mock_script;
  std::optional<std::string> cache_dir;
  std::optional<std::string> prompts_dir;
  std::optional<std::string> simulator;
  std::optional<std::string> sim_table;
  std::optional<std::string> mocksim;
  std::optional<int> timeout_ms;
  std::optional<int> jobs;
  std::optional<int> n;
  std::optional<int> m_min;
  std::optional<std::string> loss;
  std::optional<int> cot_x;
  std::optional<int> cot_th;
  std::optional<int> cot_depth;
  bool no_cot = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> repetitions;
  std::optional<std::string> runs_dir;
  std::optional<std::string> run_dir;
  bool timings = false;
  bool keep_failed = false;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--provider", o.provider, "mock | http_chat");
  cmd->add_option("--model", o.model);
  cmd->add_option("--endpoint", o.endpoint, "chat completions URL");
  cmd->add_option("--temperature", o.temperature);
  cmd->add_option("--mock-script", o.mock_script, "mock provider script (file or per-problem directory)");
  cmd->add_option("--cache-dir", o.cache_dir, "response cache directory");
  cmd->add_option("--prompts-dir", o.prompts_dir, "directory of prompt templates");
  cmd->add_option("--simulator", o.simulator, "mock | iverilog | verilator | custom");
  cmd->add_option("--sim-table", o.sim_table, "outcome table for the mock simulator");
  cmd->add_option("--mocksim", o.mocksim, "vrank-mocksim executable");
  cmd->add_option("--timeout-ms", o.timeout_ms, "per-run simulation timeout");
  cmd->add_option("-j,--jobs", o.jobs, "parallel simulations");
  cmd->add_option("--n", o.n, "candidates per problem");
  cmd->add_option("--m-min", o.m_min, "minimum test cases");
  cmd->add_option("--loss", o.loss, "strict | case");
  cmd->add_option("--cot-x", o.cot_x, "reasoning attempts per comparison");
  cmd->add_option("--cot-th", o.cot_th, "swap threshold in percent");
  cmd->add_option("--cot-depth", o.cot_depth, "clusters considered by arbitration");
  cmd->add_flag("--no-cot", o.no_cot, "disable arbitration");
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--runs-dir", o.runs_dir, "root for run artifacts");
  cmd->add_flag("--timings", o.timings, "record stage wall times in reports");
  cmd->add_flag("--keep-failed", o.keep_failed, "keep scratch directories of failed simulations");
}

fs::path default_mocksim() {
  std::error_code ec;
  const auto self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    auto sibling = self.parent_path() / "vrank-mocksim";
    if (fs::exists(sibling, ec)) return sibling;
  }
#ifdef VRANK_DEFAULT_MOCKSIM
  return VRANK_DEFAULT_MOCKSIM;
#else
  return "vrank-mocksim";
#endif
}

AppConfig resolve_config(const Overrides& o) {
  AppConfig cfg = o.config ? load_config(*o.config) : AppConfig{};
  auto& p = cfg.provider;
  if (o.provider) {
    if (*o.provider == "mock") p.provider = ProviderKind::mock;
    else if (*o.provider == "http_chat" || *o.provider == "openai") p.provider = ProviderKind::http_chat;
    else throw Error(Errc::invalid_config, "unknown provider '" + *o.provider + "'");
  }
  if (o.model) p.model = *o.model;
  if (o.endpoint) p.endpoint = *o.endpoint;
  if (o.temperature) p.temperature = *o.temperature;
  if (o.mock_script) p.mock_script = *o.mock_script;
  if (o.cache_dir) p.cache_dir = *o.cache_dir;
  if (o.prompts_dir) cfg.prompts_dir = fs::path(*o.prompts_dir);

  auto& s = cfg.simulator;
  if (o.simulator) s.kind = simulator_kind_from_string(*o.simulator);
  if (o.sim_table) s.table = *o.sim_table;
  if (o.mocksim) s.mocksim = *o.mocksim;
  if (s.kind == SimulatorKind::mock && s.mocksim.empty()) s.mocksim = default_mocksim();
  if (o.timeout_ms) s.timeout = std::chrono::milliseconds(*o.timeout_ms);
  if (o.jobs) s.max_parallel = *o.jobs;
  if (o.keep_failed) s.keep_failed = true;

  auto& r = cfg.run;
  if (o.n) r.n = *o.n;
  if (o.m_min) r.m_min = *o.m_min;
  if (o.loss) r.loss = loss_kind_from_string(*o.loss);
  if (o.cot_x) r.cot.x = *o.cot_x;
  if (o.cot_th) r.cot.th = *o.cot_th;
  if (o.cot_depth) r.cot.depth = *o.cot_depth;
  if (o.no_cot) r.cot.enabled = false;
  if (o.seed) r.seed = *o.seed;
  if (o.repetitions) cfg.repetitions = *o.repetitions;
  if (o.runs_dir) cfg.runs_dir = *o.runs_dir;
  return cfg;
}

fs::path fresh_run_dir(const AppConfig& cfg, const Overrides& o, const std::string& problem_id) {
  if (o.run_dir) return *o.run_dir;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream stamp;
  stamp << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  const auto base = cfg.runs_dir / problem_id / stamp.str();
  auto dir = base;
  for (int i = 1; fs::exists(dir); ++i) dir = base.string() + "-" + std::to_string(i);
  return dir;
}

fs::path candidate_path(const fs::path& run_dir, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "cand_%03d.v", index);
  return run_dir / "candidates" / name;
}

void write_artifacts(const fs::path& dir, const RunReport& report) {
  for (const auto& c : report.candidates) write_file(candidate_path(dir, c.index), c.source);
  if (report.testbench) write_file(dir / "testbench.v", report.testbench->source);
  if (!report.traces.empty()) write_file(dir / "traces.jsonl", dump_traces_jsonl(report.traces));
  write_file(dir / "report.json", dump_report(report));
}

void print_ranking(const RunReport& report, const fs::path& dir) {
  std::cout << "problem " << report.problem_id << ": " << report.candidates.size() << " candidates, "
            << report.test_cases.size() << " test cases\n";
  if (!report.scored_clusters.empty()) {
    std::cout << "rank  score     size  members\n";
    const auto ordered = final_cluster_order(report);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const auto& s = ordered[i];
      std::ostringstream members;
      for (std::size_t k = 0; k < s.cluster.members.size(); ++k)
        members << (k ? "," : "") << s.cluster.members[k];
      std::cout << std::left << std::setw(6) << i + 1 << std::setw(10) << score_to_string(s.score)
                << std::setw(6) << s.cluster.size() << members.str()
                << (s.cluster.failed ? "  [" + to_string(s.cluster.canonical_trace.status) + "]" : "") << "\n";
    }
  }
  for (const auto& d : report.cot_decisions) {
    std::cout << "arbitration: cluster " << d.incumbent << " vs " << d.challenger;
    if (d.case_index) std::cout << " on case " << *d.case_index;
    std::cout << ": " << d.match_count << "/" << d.predictions.size() << " predictions back the challenger (need "
              << d.required << ")" << (d.swap ? ", swapped" : ", kept");
    if (!d.note.empty()) std::cout << " [" << d.note << "]";
    std::cout << "\n";
  }
  if (!report.final_ranking.empty())
    std::cout << "selected: " << candidate_path(dir, report.final_ranking.front()).string() << "\n";
  if (report.error) std::cerr << "error: " << *report.error << "\n";
  std::cout << "report: " << (dir / "report.json").string() << "\n";
}

int cmd_generate(const Overrides& o, const std::string& problem_file) {
  const auto cfg = resolve_config(o);
  const auto inputs = read_pipeline_inputs(problem_file);
  auto gateway = Gateway::from_config(cfg.provider, cfg.templates(), inputs.problem.id);
  RunReport report;
  report.problem_id = inputs.problem.id;
  report.params = cfg.run;
  stage_generate(report, inputs, gateway);
  const auto dir = fresh_run_dir(cfg, o, inputs.problem.id);
  write_artifacts(dir, report);
  std::cout << "generated " << report.candidates.size() << " candidates and " << report.test_cases.size()
            << " test cases in " << dir.string() << "\n";
  return 0;
}

int cmd_rank(const Overrides& o, const std::string& problem_file) {
  const auto cfg = resolve_config(o);
  const auto inputs = read_pipeline_inputs(problem_file);
  auto gateway = Gateway::from_config(cfg.provider, cfg.templates(), inputs.problem.id);
  const auto report = run_pipeline(inputs, gateway, cfg.simulator.build(), cfg.run, o.timings);
  const auto dir = fresh_run_dir(cfg, o, inputs.problem.id);
  write_artifacts(dir, report);
  print_ranking(report, dir);
  return report.error ? 1 : 0;
}

int cmd_resolve(const Overrides& o, const std::string& problem_file, const std::string& report_file) {
  const auto cfg = resolve_config(o);
  const auto inputs = read_pipeline_inputs(problem_file);
  auto report = parse_report(read_file(report_file));
  // arbitration settings come from the invocation, everything else from the report
  report.params.cot = cfg.run.cot;
  report.error.reset();
  auto gateway = Gateway::from_config(cfg.provider, cfg.templates(), inputs.problem.id);
  if (report.traces.size() != report.candidates.size()) stage_simulate(report, cfg.simulator.build());
  stage_rank(report, inputs.problem, &gateway);
  const auto dir = o.run_dir ? fs::path(*o.run_dir) : fs::path(report_file).parent_path();
  write_artifacts(dir, report);
  print_ranking(report, dir);
  return 0;
}

int cmd_eval(const Overrides& o, const std::string& manifest_file) {
  const auto cfg = resolve_config(o);
  BenchmarkConfig bench;
  bench.provider = cfg.provider;
  bench.templates = cfg.templates();
  bench.simulator = cfg.simulator.build();
  bench.params = cfg.run;
  bench.repetitions = cfg.repetitions;
  bench.max_parallel_problems = cfg.max_parallel_problems;
  bench.record_timings = o.timings;
  const auto dir = o.run_dir ? fs::path(*o.run_dir) : fresh_run_dir(cfg, o, "benchmark");
  bench.runs_dir = dir;
  const auto report = run_benchmark(read_manifest(manifest_file), bench);
  write_file(dir / "benchmark.json", benchmark_to_json(report).dump(2) + "\n");
  std::cout << render_benchmark_table(report);
  std::cout << "results: " << (dir / "benchmark.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vrank: rank LLM-generated HDL candidates by simulated consistency"};
  app.require_subcommand(1);
  Overrides o;
  std::string problem, report_file, manifest;

  auto* generate = app.add_subcommand("generate", "generate candidates, test cases and the testbench");
  generate->add_option("problem", problem, "problem JSON file")->required();
  generate->add_option("--run-dir", o.run_dir, "artifact directory");
  add_common_options(generate, o);

  auto* rank = app.add_subcommand("rank", "run the full pipeline on one problem");
  rank->add_option("problem", problem, "problem JSON file")->required();
  rank->add_option("--run-dir", o.run_dir, "artifact directory");
  add_common_options(rank, o);

  auto* resolve = app.add_subcommand("resolve", "re-run ranking and arbitration on a saved report");
  resolve->add_option("problem", problem, "problem JSON file")->required();
  resolve->add_option("--report", report_file, "report.json from an earlier run")->required();
  resolve->add_option("--run-dir", o.run_dir, "artifact directory (default: the report's)");
  add_common_options(resolve, o);

  auto* eval = app.add_subcommand("eval", "benchmark a manifest of problems");
  eval->add_option("manifest", manifest, "JSONL or JSON-array manifest")->required();
  eval->add_option("--repetitions", o.repetitions);
  eval->add_option("--run-dir", o.run_dir, "artifact directory");
  add_common_options(eval, o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*generate) return cmd_generate(o, problem);
    if (*rank) return cmd_rank(o, problem);
    if (*resolve) return cmd_resolve(o, problem, report_file);
    return cmd_eval(o, manifest);
  } catch (const Error& e) {
    std::cerr << "vrank: " << e.what() << "\n";
    return e.code() == Errc::config_error || e.code() == Errc::invalid_config ? 2 : 1;
  }
}
