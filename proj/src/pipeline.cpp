#include "vrank/pipeline.hpp"

#include <chrono>

#include "vrank/clustering.hpp"
#include "vrank/cot.hpp"
#include "vrank/generation.hpp"
#include "vrank/json_io.hpp"
#include "vrank/scoring.hpp"
#include "vrank/testbench.hpp"

namespace vrank {

namespace {

class StageTimer {
 public:
  StageTimer(RunReport& report, const char* stage, bool enabled)
      : report_(report), stage_(stage), enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    if (!enabled_) return;
    report_.timings[stage_] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  RunReport& report_;
  const char* stage_;
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

PipelineInputs read_pipeline_inputs(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  PipelineInputs inputs;
  try {
    inputs.problem = j.get<Problem>();
    if (auto it = j.find("candidates"); it != j.end() && !it->is_null()) {
      std::vector<Candidate> candidates;
      for (const auto& entry : *it) {
        Candidate c;
        c.index = static_cast<int>(candidates.size());
        c.source = entry.is_string() ? entry.get<std::string>() : entry.at("source").get<std::string>();
        c.provenance = Provenance{ProvenanceKind::injected, "file", ""};
        candidates.push_back(std::move(c));
      }
      inputs.injected_candidates = std::move(candidates);
    }
    if (auto it = j.find("test_cases"); it != j.end() && !it->is_null()) {
      std::vector<TestCase> cases;
      for (const auto& entry : *it) {
        TestCase t;
        t.index = static_cast<int>(cases.size());
        if (entry.is_string()) {
          t.stimulus = entry.get<std::string>();
        } else {
          t.stimulus = entry.at("stimulus").get<std::string>();
          if (entry.contains("description")) t.description = entry.at("description").get<std::string>();
        }
        cases.push_back(std::move(t));
      }
      inputs.injected_test_cases = std::move(cases);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  validate(inputs.problem);
  return inputs;
}

void stage_generate(RunReport& report, const PipelineInputs& inputs, Gateway& gateway) {
  const auto& params = report.params;
  if (report.candidates.empty()) {
    report.candidates = inputs.injected_candidates ? *inputs.injected_candidates
                                                   : generate_candidates(inputs.problem, params.n, gateway);
  }
  if (report.test_cases.empty()) {
    report.test_cases = inputs.injected_test_cases ? *inputs.injected_test_cases
                                                   : generate_test_cases(inputs.problem, params.m_min, gateway);
  }
  if (!report.testbench) {
    TestbenchOptions options;
    options.marker_prefix = params.marker_prefix;
    options.settle_delay = params.settle_delay;
    report.testbench = assemble_testbench(report.test_cases, inputs.problem.module_interface, options);
  }
}

void stage_simulate(RunReport& report, const SimulatorConfig& sim) {
  if (!report.testbench) throw Error(Errc::invalid_argument, "simulate stage needs a testbench");
  if (report.traces.size() == report.candidates.size() && !report.traces.empty()) return;
  report.traces = run_all(report.candidates, *report.testbench, sim);
}

void stage_rank(RunReport& report, const Problem& problem, Gateway* gateway) {
  if (report.traces.size() != report.candidates.size() || report.traces.empty())
    throw Error(Errc::invalid_argument, "rank stage needs one trace per candidate");
  const auto& params = report.params;

  report.scored_clusters = rank(score_clusters(cluster(report.traces), report.traces, params.loss));
  report.cluster_order.resize(report.scored_clusters.size());
  for (std::size_t i = 0; i < report.cluster_order.size(); ++i) report.cluster_order[i] = static_cast<int>(i);
  report.cot_decisions.clear();

  if (params.cot.enabled && gateway != nullptr && report.testbench) {
    auto resolved = resolve(report.scored_clusters, problem, *report.testbench, report.test_cases,
                            params.cot, *gateway);
    report.cluster_order = std::move(resolved.order);
    report.cot_decisions = std::move(resolved.decisions);
  }

  const auto ordered = final_cluster_order(report);
  report.final_ranking = select_representatives(ordered, static_cast<int>(ordered.size()),
                                                params.representative, params.seed);
}

std::vector<ScoredCluster> final_cluster_order(const RunReport& report) {
  std::vector<ScoredCluster> ordered;
  ordered.reserve(report.cluster_order.size());
  for (int id : report.cluster_order) ordered.push_back(report.scored_clusters.at(static_cast<std::size_t>(id)));
  return ordered;
}

RunReport run_pipeline(const PipelineInputs& inputs, Gateway& gateway, const SimulatorConfig& sim,
                       const RunParams& params, bool record_timings) {
  RunReport report;
  report.problem_id = inputs.problem.id;
  report.params = params;
  try {
    validate(inputs.problem);
    {
      StageTimer t(report, "generate", record_timings);
      stage_generate(report, inputs, gateway);
    }
    {
      StageTimer t(report, "simulate", record_timings);
      stage_simulate(report, sim);
    }
    {
      StageTimer t(report, "rank", record_timings);
      stage_rank(report, inputs.problem, &gateway);
    }
  } catch (const Error& e) {
    report.error = e.what();
  }
  return report;
}

}  // namespace vrank
