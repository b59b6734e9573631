// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "vrank/clustering.hpp"
#include "vrank/config.hpp"
#include "vrank/cot.hpp"
#include "vrank/evaluation.hpp"
#include "vrank/json_io.hpp"
#include "vrank/pipeline.hpp"
#include "vrank/scoring.hpp"
#include "vrank/subprocess.hpp"

using namespace vrank;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and budgets.
constexpr double kWorkedExampleBudgetS = 1.0;
constexpr int kScoringInstances = 200;
constexpr int kScoringMaxN = 12;
constexpr int kScoringMaxM = 6;
constexpr double kScoringBudgetS = 10.0;
constexpr int kClusteringInstances = 500;
constexpr int kMonteCarloTrials = 200'000;
constexpr double kMonteCarloTolerance = 0.01;
constexpr double kExactTolerance = 1e-12;
constexpr int kSwapMaxX = 6;
constexpr int kSwapThresholds[] = {50, 80, 100};
constexpr double kBenchmarkBudgetS = 5.0;
constexpr int kBenchmarkMinProblems = 5;
constexpr std::uint64_t kSeed = 20240917;

const fs::path kData = VRANK_DATA_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  const auto start = Clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %-22s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Outcome worked_example() {
  const auto start = Clock::now();
  const auto app = load_config(kData / "demo" / "config.json");
  const auto inputs = read_pipeline_inputs(kData / "demo" / "problem.json");
  auto gw = Gateway::from_config(app.provider, PromptTemplates::defaults(), inputs.problem.id);
  const auto report = run_pipeline(inputs, gw, mock_simulator(VRANK_MOCKSIM, app.simulator.table), app.run);
  const double secs = seconds_since(start);
  if (report.error) return {false, *report.error};

  std::ostringstream got;
  std::vector<Score> scores;
  for (const auto& s : report.scored_clusters) {
    scores.push_back(s.score);
    got << (scores.size() > 1 ? "," : "") << score_to_string(s.score) << "(" << s.cluster.size() << ")";
  }
  const bool shape = report.candidates.size() == 10 && scores == std::vector<Score>{Score(5), Score(3), Score(2)};
  bool sizes_match = true;
  for (const auto& s : report.scored_clusters) sizes_match = sizes_match && s.score == Score(s.cluster.size());
  std::ostringstream d;
  d << "strict scores(size) " << got.str() << ", expected 5,3,2; pipeline " << secs << " s < "
    << kWorkedExampleBudgetS << " s";
  return {shape && sizes_match && secs < kWorkedExampleBudgetS, d.str()};
}

Outcome scoring_oracle() {
  const auto start = Clock::now();
  testing::Rng rng(kSeed);
  int mismatches = 0, with_failures = 0, checked = 0;
  for (int iter = 0; iter < kScoringInstances; ++iter) {
    const int n = testing::uniform(rng, 1, kScoringMaxN);
    const int m = testing::uniform(rng, 1, kScoringMaxM);
    const auto traces = testing::random_traces(rng, n, m, testing::uniform(rng, 1, 3), 0.2);
    if (std::any_of(traces.begin(), traces.end(), [](const auto& t) { return !t.ok(); })) ++with_failures;
    for (auto loss : {LossKind::strict, LossKind::case_wise}) {
      for (const auto& s : score_clusters(cluster(traces), traces, loss)) {
        for (int member : s.cluster.members) {
          ++checked;
          if (s.score * m != Score(testing::oracle_scaled_score(traces, member, loss, m))) ++mismatches;
        }
      }
    }
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << kScoringInstances << " instances (" << with_failures << " with failures), " << checked
    << " exact comparisons, " << mismatches << " mismatches; " << secs << " s < " << kScoringBudgetS << " s";
  return {mismatches == 0 && with_failures > 0 && secs < kScoringBudgetS, d.str()};
}

Outcome clustering_partition() {
  testing::Rng rng(kSeed + 1);
  int bad = 0;
  for (int iter = 0; iter < kClusteringInstances; ++iter) {
    const int n = testing::uniform(rng, 1, 20);
    const auto traces = testing::random_traces(rng, n, testing::uniform(rng, 1, 5), testing::uniform(rng, 1, 3), 0.2);
    const auto clusters = cluster(traces);
    std::vector<int> seen(n, 0);
    std::set<std::set<int>> sets;
    bool ok = true;
    for (const auto& c : clusters) {
      for (int m : c.members) ++seen[m];
      sets.insert({c.members.begin(), c.members.end()});
      if (c.failed && c.members.size() != 1) ok = false;
      if (c.failed != !traces[c.members.front()].ok()) ok = false;
    }
    ok = ok && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    ok = ok && sets == testing::oracle_partition(traces);
    if (!ok) ++bad;
  }
  std::ostringstream d;
  d << kClusteringInstances << " trace sets, " << bad << " not matching the pairwise partition";
  return {bad == 0, d.str()};
}

Outcome pass_at_k_estimator() {
  testing::Rng rng(kSeed + 2);
  double worst = 0.0;
  int combos = 0;
  for (int n : {4, 10, 50}) {
    std::vector<int> pool(n);
    for (int c = 0; c <= n; ++c) {
      // first_hit[j] counts trials whose first correct sample is at position j; n means none.
      std::vector<long> first_hit(n + 1, 0);
      for (int t = 0; t < kMonteCarloTrials; ++t) {
        std::iota(pool.begin(), pool.end(), 0);
        int pos = 0;
        for (; pos < n; ++pos) {
          std::swap(pool[pos], pool[testing::uniform(rng, pos, n - 1)]);
          if (pool[pos] < c) break;
        }
        ++first_hit[pos];
      }
      long cumulative = 0;
      for (int k = 1; k <= n; ++k) {
        cumulative += first_hit[k - 1];
        const double estimate = static_cast<double>(cumulative) / kMonteCarloTrials;
        worst = std::max(worst, std::abs(pass_at_k(n, c, k) - estimate));
        ++combos;
      }
    }
  }
  const double exact = pass_at_k(4, 2, 2);
  std::ostringstream d;
  d << combos << " (n,c,k) with n in {4,10,50}: max |formula - MC| = " << worst << " <= " << kMonteCarloTolerance
    << "; pass@2(4,2) = " << exact << " vs 5/6";
  return {worst <= kMonteCarloTolerance && std::abs(exact - 5.0 / 6.0) <= kExactTolerance, d.str()};
}

Outcome cot_swap_rule() {
  const std::vector<ScoredCluster> ranked = {
      {{{0, 1, 2}, {TraceStatus::ok, {"VRANK 0 y=0", "VRANK 1 y=1"}}, false}, Score(3)},
      {{{3, 4}, {TraceStatus::ok, {"VRANK 0 y=0", "VRANK 1 y=2"}}, false}, Score(2)}};
  int cases = 0, wrong = 0, depth_one_changes = 0;
  for (int x = 1; x <= kSwapMaxX; ++x) {
    for (int th : kSwapThresholds) {
      for (int count = 0; count <= x; ++count) {
        auto predict = [&](int, int attempts) {
          std::vector<ReferencePrediction> out;
          for (int i = 0; i < attempts; ++i)
            out.push_back({i, std::map<std::string, std::string>{{"y", i < count ? "2" : "1"}}, "", ""});
          return out;
        };
        CotParams p;
        p.x = x;
        p.th = th;
        p.depth = 2;
        const bool expected = count * 100 >= th * x;  // count >= ceil(th/100 * x)
        const auto r = resolve(ranked, {"y"}, p, predict);
        const bool swapped = r.order == std::vector<int>{1, 0};
        if (swapped != expected || r.decisions.size() != 1 || r.decisions[0].swap != expected) ++wrong;
        p.depth = 1;
        const auto flat = resolve(ranked, {"y"}, p, predict);
        if (flat.order != std::vector<int>{0, 1} || !flat.decisions.empty()) ++depth_one_changes;
        ++cases;
      }
    }
  }
  std::ostringstream d;
  d << cases << " (x,th,count) cases, " << wrong << " disagree with count >= ceil(th*x/100); depth=1 changed "
    << depth_one_changes;
  return {wrong == 0 && depth_one_changes == 0, d.str()};
}

Outcome end_to_end_benchmark() {
  const auto start = Clock::now();
  const auto app = load_config(kData / "bench" / "config.json");
  BenchmarkConfig cfg;
  cfg.provider = app.provider;
  cfg.simulator = mock_simulator(VRANK_MOCKSIM, app.simulator.table);
  cfg.params = app.run;
  const auto manifest = read_manifest(kData / "bench" / "manifest.jsonl");
  const auto report = run_benchmark(manifest, cfg);
  const double secs = seconds_since(start);

  int majority_correct = 0;
  for (const auto& r : report.results) majority_correct += r.table.first_correct_rank == 1 ? 1 : 0;
  const double vrank1 = report.summary.at("vrank@1").mean;
  const double base1 = report.summary.at("baseline@1").mean;
  std::ostringstream d;
  d << manifest.size() << " problems, top cluster correct in " << majority_correct << "; vrank@1 = " << vrank1
    << ", baseline@1 = " << base1 << "; " << secs << " s < " << kBenchmarkBudgetS << " s";
  const bool pass = static_cast<int>(manifest.size()) >= kBenchmarkMinProblems && report.errors == 0 &&
                    majority_correct == 4 && std::abs(vrank1 - 0.8) <= kExactTolerance && base1 < 0.8 &&
                    secs < kBenchmarkBudgetS;
  return {pass, d.str()};
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "vrank-acceptance-determinism";
  fs::remove_all(root);
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const auto dir = root / ("run" + std::to_string(i));
    const auto cmd = shell_quote(VRANK_CLI) + " rank " + shell_quote((kData / "demo" / "problem.json").string()) +
                     " --config " + shell_quote((kData / "demo" / "config.json").string()) + " --mocksim " +
                     shell_quote(VRANK_MOCKSIM) + " --seed 1234 --jobs " + std::to_string(1 + 3 * i) +
                     " --run-dir " + shell_quote(dir.string());
    const auto r = run_shell(cmd, root.parent_path(), std::chrono::seconds(60));
    if (!r.exited || r.exit_code != 0) return {false, "rank run " + std::to_string(i) + " failed: " + r.err};
    reports[i] = read_file(dir / "report.json");
  }
  std::ostringstream d;
  d << "two rank runs (seed 1234, 1 vs 4 simulation workers): report.json " << reports[0].size() << " bytes, "
    << (reports[0] == reports[1] ? "identical" : "DIFFERENT");
  return {reports[0] == reports[1] && !reports[0].empty(), d.str()};
}

}  // namespace

int main() {
  report("worked_example", worked_example);
  report("scoring_oracle", scoring_oracle);
  report("clustering_partition", clustering_partition);
  report("pass_at_k", pass_at_k_estimator);
  report("cot_swap_rule", cot_swap_rule);
  report("end_to_end_benchmark", end_to_end_benchmark);
  report("determinism", determinism);
  std::printf("%s: %d failing\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
