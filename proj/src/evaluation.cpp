#include "vrank/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "vrank/clustering.hpp"
#include "vrank/json_io.hpp"
#include "vrank/pipeline.hpp"
#include "vrank/scoring.hpp"

namespace vrank {

namespace {

constexpr int kMaxK = 3;

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (auto i = next++; i < count; i = next++) fn(i);
  };
  const auto w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (w <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < w; ++i) pool.emplace_back(loop);
}

std::vector<double> top_k_hits(const std::vector<int>& picks, const std::vector<bool>& judgments) {
  std::vector<double> hits;
  bool any = false;
  for (int k = 0; k < kMaxK; ++k) {
    if (k < static_cast<int>(picks.size())) any = any || judgments.at(static_cast<std::size_t>(picks[k]));
    hits.push_back(any ? 1.0 : 0.0);
  }
  return hits;
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << v * 100.0 << "%";
  return os.str();
}

std::vector<std::string> column_names(const RunParams& params) {
  std::vector<std::string> cols;
  for (int k = 1; k <= kMaxK; ++k) cols.push_back("baseline@" + std::to_string(k));
  for (int k = 1; k <= kMaxK; ++k) cols.push_back("vrank@" + std::to_string(k));
  if (params.cot.enabled) cols.push_back("cot@1");
  if (params.loss == LossKind::case_wise)
    for (int k = 1; k <= kMaxK; ++k) cols.push_back("case@" + std::to_string(k));
  return cols;
}

std::optional<double> column_value(const ProblemResult& r, const std::string& col) {
  const auto at = col.find('@');
  const auto family = col.substr(0, at);
  const auto k = std::stoi(col.substr(at + 1)) - 1;
  if (family == "baseline") return r.baseline.at(k);
  if (family == "vrank") return r.method.at(k);
  if (family == "cot") return r.cot_top1;
  if (family == "case" && !r.case_method.empty()) return r.case_method.at(k);
  return std::nullopt;
}

ProblemResult evaluate_problem(const Problem& problem, int repetition, const BenchmarkConfig& cfg) {
  ProblemResult result;
  result.problem_id = problem.id;
  result.repetition = repetition;
  try {
    if (!problem.reference_testbench)
      throw Error(Errc::missing_reference_testbench, "problem '" + problem.id + "' has no reference testbench");
    auto gateway = Gateway::from_config(cfg.provider, cfg.templates, problem.id);
    RunParams params = cfg.params;
    params.seed += static_cast<std::uint64_t>(repetition);

    const auto report = run_pipeline(PipelineInputs{problem, {}, {}}, gateway, cfg.simulator, params,
                                     cfg.record_timings);
    if (!cfg.runs_dir.empty()) {
      write_file(cfg.runs_dir / problem.id / ("rep-" + std::to_string(repetition)) / "report.json",
                 dump_report(report));
    }
    if (report.error) throw Error(Errc::invalid_argument, *report.error);

    // identical sources share one judgment
    std::map<std::string, std::size_t> unique_index;
    std::vector<const Candidate*> unique;
    for (const auto& c : report.candidates)
      if (unique_index.try_emplace(c.source, unique.size()).second) unique.push_back(&c);
    std::vector<char> verdicts(unique.size(), 0);
    std::mutex error_mutex;
    std::exception_ptr error;
    parallel_for(unique.size(), cfg.simulator.max_parallel_simulations, [&](std::size_t i) {
      try {
        verdicts[i] = judge_candidate(*unique[i], problem, cfg.simulator, cfg.judge) ? 1 : 0;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    if (error) std::rethrow_exception(error);
    std::vector<bool> judgments;
    for (const auto& c : report.candidates) judgments.push_back(verdicts[unique_index.at(c.source)] != 0);

    result.n = static_cast<int>(report.candidates.size());
    result.correct = static_cast<int>(std::count(judgments.begin(), judgments.end(), true));
    for (int k = 1; k <= kMaxK; ++k)
      result.baseline.push_back(pass_at_k(result.n, result.correct, std::min(k, result.n)));

    const auto strict_ranked =
        params.loss == LossKind::strict
            ? report.scored_clusters
            : rank(score_clusters(cluster(report.traces), report.traces, LossKind::strict));
    result.method = top_k_hits(select_representatives(strict_ranked, kMaxK, params.representative, params.seed),
                               judgments);
    if (params.loss == LossKind::case_wise) {
      result.case_method = top_k_hits(
          select_representatives(report.scored_clusters, kMaxK, params.representative, params.seed), judgments);
    }
    if (params.cot.enabled && !report.final_ranking.empty())
      result.cot_top1 = judgments.at(static_cast<std::size_t>(report.final_ranking.front())) ? 1.0 : 0.0;
    result.table = consistency_report(report.traces, strict_ranked, judgments);
  } catch (const Error& e) {
    result.error = e.what();
  }
  return result;
}

}  // namespace

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n)
    throw Error(Errc::domain_error, "pass_at_k requires 0 <= c <= n and 1 <= k <= n (n=" + std::to_string(n) +
                                        ", c=" + std::to_string(c) + ", k=" + std::to_string(k) + ")");
  if (n - c < k) return 1.0;
  double all_wrong = 1.0;
  for (int i = n - c + 1; i <= n; ++i) all_wrong *= 1.0 - static_cast<double>(k) / i;
  return 1.0 - all_wrong;
}

bool judge_candidate(const Candidate& candidate, const Problem& problem, const SimulatorConfig& cfg,
                     const JudgeOptions& options) {
  if (!problem.reference_testbench)
    throw Error(Errc::missing_reference_testbench, "problem '" + problem.id + "' has no reference testbench");
  const auto outcome = simulate(candidate.source, *problem.reference_testbench, cfg, SimRole::judge);
  if (!outcome.compiled || !outcome.exited_cleanly) return false;
  std::vector<std::regex> patterns;
  for (const auto& p : options.fail_patterns) patterns.emplace_back(p);
  std::istringstream lines(outcome.out);
  std::string line;
  while (std::getline(lines, line)) {
    for (const auto& re : patterns)
      if (std::regex_search(line, re)) return false;
  }
  return true;
}

ConsistencyTable consistency_report(const std::vector<ExecutionTrace>& traces,
                                    const std::vector<ScoredCluster>& ranked,
                                    const std::vector<bool>& judgments) {
  if (judgments.size() != traces.size())
    throw Error(Errc::invalid_argument, "judgments must align with candidates");
  std::vector<bool> consistent(traces.size(), false);
  for (const auto& s : ranked) {
    if (s.cluster.failed || s.cluster.size() < 2) continue;
    for (int m : s.cluster.members) consistent.at(static_cast<std::size_t>(m)) = true;
  }
  ConsistencyTable table;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (judgments[i]) {
      ++(consistent[i] ? table.correct_consistent : table.correct_inconsistent);
    } else {
      ++(consistent[i] ? table.incorrect_consistent : table.incorrect_inconsistent);
    }
  }
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& members = ranked[r].cluster.members;
    if (std::any_of(members.begin(), members.end(), [&](int m) { return judgments.at(static_cast<std::size_t>(m)); })) {
      table.first_correct_rank = static_cast<int>(r) + 1;
      break;
    }
  }
  return table;
}

std::string render_consistency_table(const ConsistencyTable& t) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "" << std::setw(18) << "has consistency" << "no consistency\n";
  os << std::setw(12) << "Correct" << std::setw(18) << t.correct_consistent << t.correct_inconsistent << "\n";
  os << std::setw(12) << "Incorrect" << std::setw(18) << t.incorrect_consistent << t.incorrect_inconsistent << "\n";
  return os.str();
}

BenchmarkReport run_benchmark(const std::vector<Problem>& manifest, const BenchmarkConfig& cfg) {
  if (manifest.empty()) throw Error(Errc::invalid_argument, "benchmark manifest is empty");
  if (cfg.repetitions < 1) throw Error(Errc::invalid_config, "repetitions must be >= 1");
  cfg.simulator.validate();

  BenchmarkReport report;
  report.params = cfg.params;
  report.repetitions = cfg.repetitions;

  const std::size_t tasks = manifest.size() * static_cast<std::size_t>(cfg.repetitions);
  report.results.resize(tasks);
  parallel_for(tasks, cfg.max_parallel_problems, [&](std::size_t t) {
    const auto rep = static_cast<int>(t / manifest.size());
    report.results[t] = evaluate_problem(manifest[t % manifest.size()], rep, cfg);
  });

  const auto columns = column_names(cfg.params);
  std::map<std::string, std::vector<double>> per_rep;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    std::map<std::string, double> sums;
    std::map<std::string, int> counts;
    for (const auto& r : report.results) {
      if (r.repetition != rep || r.error) continue;
      for (const auto& col : columns) {
        if (auto v = column_value(r, col)) {
          sums[col] += *v;
          ++counts[col];
        }
      }
    }
    for (const auto& col : columns)
      if (counts[col] > 0) per_rep[col].push_back(sums[col] / counts[col]);
  }
  for (const auto& [col, values] : per_rep) {
    MetricSummary s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    report.summary[col] = s;
  }

  for (const auto& r : report.results) {
    if (r.error) {
      ++report.errors;
      continue;
    }
    report.totals.correct_consistent += r.table.correct_consistent;
    report.totals.correct_inconsistent += r.table.correct_inconsistent;
    report.totals.incorrect_consistent += r.table.incorrect_consistent;
    report.totals.incorrect_inconsistent += r.table.incorrect_inconsistent;
    ++report.first_correct_rank_histogram[r.table.first_correct_rank
                                              ? std::to_string(*r.table.first_correct_rank)
                                              : "none"];
    if (r.n < 50) report.small_n = true;
  }
  return report;
}

nlohmann::json benchmark_to_json(const BenchmarkReport& report) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json j = {{"problem_id", r.problem_id},
                        {"repetition", r.repetition},
                        {"n", r.n},
                        {"correct", r.correct},
                        {"baseline", r.baseline},
                        {"method", r.method},
                        {"cot_top1", r.cot_top1 ? nlohmann::json(*r.cot_top1) : nlohmann::json()},
                        {"case_method", r.case_method},
                        {"consistency",
                         {{"correct_consistent", r.table.correct_consistent},
                          {"correct_inconsistent", r.table.correct_inconsistent},
                          {"incorrect_consistent", r.table.incorrect_consistent},
                          {"incorrect_inconsistent", r.table.incorrect_inconsistent},
                          {"first_correct_rank", r.table.first_correct_rank ? nlohmann::json(*r.table.first_correct_rank)
                                                                            : nlohmann::json()}}},
                        {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json()}};
    results.push_back(std::move(j));
  }
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [col, s] : report.summary) summary[col] = {{"mean", s.mean}, {"stddev", s.stddev}};
  return {{"params", report.params},
          {"repetitions", report.repetitions},
          {"results", results},
          {"summary", summary},
          {"consistency_totals",
           {{"correct_consistent", report.totals.correct_consistent},
            {"correct_inconsistent", report.totals.correct_inconsistent},
            {"incorrect_consistent", report.totals.incorrect_consistent},
            {"incorrect_inconsistent", report.totals.incorrect_inconsistent}}},
          {"first_correct_rank_histogram", report.first_correct_rank_histogram},
          {"errors", report.errors},
          {"small_n", report.small_n}};
}

std::string render_benchmark_table(const BenchmarkReport& report) {
  const auto columns = column_names(report.params);
  std::ostringstream os;
  os << std::left << std::setw(24) << "problem";
  for (const auto& c : columns) os << std::setw(12) << c;
  os << "\n";
  for (const auto& r : report.results) {
    std::string label = r.problem_id;
    if (report.repetitions > 1) label += "#" + std::to_string(r.repetition);
    os << std::setw(24) << label;
    if (r.error) {
      os << "error: " << *r.error << "\n";
      continue;
    }
    for (const auto& c : columns) {
      auto v = column_value(r, c);
      os << std::setw(12) << (v ? percent(*v) : std::string("-"));
    }
    os << "\n";
  }
  os << std::setw(24) << "mean";
  for (const auto& c : columns) {
    auto it = report.summary.find(c);
    std::string cell = it == report.summary.end() ? "-" : percent(it->second.mean);
    if (it != report.summary.end() && report.repetitions > 1) cell += "±" + percent(it->second.stddev);
    os << std::setw(12) << cell;
  }
  os << "\n\n" << render_consistency_table(report.totals);
  os << "first correct cluster rank:";
  for (const auto& [rank, count] : report.first_correct_rank_histogram) os << " " << rank << "=" << count;
  os << "\n";
  if (report.small_n) os << "note: n < 50 samples per problem; baseline estimates are coarser than a 50-sample run\n";
  if (report.errors > 0) os << report.errors << " problem run(s) errored\n";
  return os.str();
}

}  // namespace vrank
