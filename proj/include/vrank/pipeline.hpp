#pragma once

#include <optional>
#include <vector>

#include "vrank/gateway.hpp"
#include "vrank/model.hpp"
#include "vrank/simulation.hpp"

namespace vrank {

/// A problem plus optional pre-supplied artifacts. Injected candidates or
/// test cases bypass the corresponding LLM request.
struct PipelineInputs {
  Problem problem;
  std::optional<std::vector<Candidate>> injected_candidates;
  std::optional<std::vector<TestCase>> injected_test_cases;
};

/// Reads a problem file: a Problem object, optionally carrying
/// "candidates" (list of sources) and "test_cases" (list of
/// {stimulus, description?}) to inject.
PipelineInputs read_pipeline_inputs(const std::filesystem::path& path);

// Stages fill in a RunReport and can be re-entered on a persisted report.

/// Candidates, test cases and the assembled testbench.
void stage_generate(RunReport& report, const PipelineInputs& inputs, Gateway& gateway);

/// One trace per candidate.
void stage_simulate(RunReport& report, const SimulatorConfig& sim);

/// Clusters, scores, ranks, optionally arbitrates the top clusters, and
/// picks one representative per cluster. `gateway` may be null when
/// arbitration is disabled.
void stage_rank(RunReport& report, const Problem& problem, Gateway* gateway);

/// All stages. Library errors are captured in report.error rather than thrown,
/// leaving whatever the completed stages produced.
RunReport run_pipeline(const PipelineInputs& inputs, Gateway& gateway, const SimulatorConfig& sim,
                       const RunParams& params, bool record_timings = false);

/// Ranked clusters in arbitration order.
std::vector<ScoredCluster> final_cluster_order(const RunReport& report);

}  // namespace vrank
