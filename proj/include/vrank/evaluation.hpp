#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vrank/gateway.hpp"
#include "vrank/model.hpp"
#include "vrank/simulation.hpp"

namespace vrank {

/// Unbiased pass@k: 1 - C(n-c, k) / C(n, k), evaluated as the running product
/// prod_{i=n-c+1}^{n} (1 - k/i) so no binomial is ever formed.
/// Throws Error{domain_error} unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

struct JudgeOptions {
  /// ECMAScript regexes; any stdout line matching one fails the candidate.
  std::vector<std::string> fail_patterns = {"FAIL", "Mismatch(?!es: 0 in)"};
};

/// Runs the problem's reference testbench against the candidate. Passes iff it
/// compiles, exits 0 within the timeout and prints no failure line.
/// Throws Error{missing_reference_testbench}.
bool judge_candidate(const Candidate& candidate, const Problem& problem, const SimulatorConfig& cfg,
                     const JudgeOptions& options = {});

/// Candidate counts by correctness and consistency (sharing an ok cluster
/// with at least one other candidate), plus the 1-based rank of the first
/// cluster holding a correct candidate.
struct ConsistencyTable {
  int correct_consistent = 0;
  int correct_inconsistent = 0;
  int incorrect_consistent = 0;
  int incorrect_inconsistent = 0;
  std::optional<int> first_correct_rank;

  bool operator==(const ConsistencyTable&) const = default;
};

ConsistencyTable consistency_report(const std::vector<ExecutionTrace>& traces,
                                    const std::vector<ScoredCluster>& ranked,
                                    const std::vector<bool>& judgments);

std::string render_consistency_table(const ConsistencyTable& table);

struct ProblemResult {
  std::string problem_id;
  int repetition = 0;
  int n = 0;
  int correct = 0;
  std::vector<double> baseline;       // pass@1..3 by unbiased estimate over all n samples
  std::vector<double> method;         // top-k representatives, strict ranking, before arbitration
  std::optional<double> cot_top1;     // top-1 after arbitration
  std::vector<double> case_method;    // case-wise ranking, filled when loss = case
  ConsistencyTable table;
  std::optional<std::string> error;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct BenchmarkConfig {
  ProviderConfig provider;
  PromptTemplates templates = PromptTemplates::defaults();
  SimulatorConfig simulator;
  RunParams params;
  JudgeOptions judge;
  int repetitions = 1;
  int max_parallel_problems = 1;
  std::filesystem::path runs_dir;  // empty: reports are not persisted
  bool record_timings = false;
};

struct BenchmarkReport {
  RunParams params;
  int repetitions = 1;
  std::vector<ProblemResult> results;
  std::map<std::string, MetricSummary> summary;  // column -> mean/stddev over repetitions
  ConsistencyTable totals;                       // first_correct_rank unused
  std::map<std::string, int> first_correct_rank_histogram;  // "1", "2", ..., "none"
  int errors = 0;
  bool small_n = false;  // n below the 50-sample baseline of the reference setup
};

/// Runs the pipeline on every problem (and repetition, seed = base + r),
/// judges all samples against the reference testbenches, and aggregates
/// pass@k columns. Per-problem failures are recorded; the run continues.
BenchmarkReport run_benchmark(const std::vector<Problem>& manifest, const BenchmarkConfig& cfg);

nlohmann::json benchmark_to_json(const BenchmarkReport& report);
std::string render_benchmark_table(const BenchmarkReport& report);

}  // namespace vrank
