#include "vrank/cot.hpp"

#include <algorithm>
#include <numeric>

#include "vrank/error.hpp"
#include "vrank/generation.hpp"
#include "vrank/simulation.hpp"
#include "vrank/testbench.hpp"

namespace vrank {

int find_distinguishing_case(const Cluster& a, const Cluster& b) {
  if (a.failed || b.failed)
    throw Error(Errc::no_distinguishing_case, "failed clusters have no records to compare");
  const auto& ra = a.canonical_trace.records;
  const auto& rb = b.canonical_trace.records;
  const auto m = std::min(ra.size(), rb.size());
  for (std::size_t t = 0; t < m; ++t)
    if (ra[t] != rb[t]) return static_cast<int>(t);
  throw Error(Errc::no_distinguishing_case, "cluster traces agree on every case");
}

int required_matches(int x, int th, bool strict_greater) {
  if (strict_greater) return (th * x) / 100 + 1;
  return (th * x + 99) / 100;
}

bool prediction_matches(const std::map<std::string, std::string>& prediction, const std::string& record,
                        const std::vector<std::string>& outputs) {
  const auto fields = record_fields(record);
  int compared = 0;
  for (const auto& name : outputs) {
    auto expected = fields.find(name);
    if (expected == fields.end()) continue;
    auto predicted = prediction.find(name);
    if (predicted == prediction.end()) return false;
    if (canonical_value(predicted->second) != canonical_value(expected->second)) return false;
    ++compared;
  }
  return compared > 0;
}

ResolveResult resolve(const std::vector<ScoredCluster>& ranked, const std::vector<std::string>& outputs,
                      const CotParams& params, const PredictionSource& predict) {
  if (params.depth < 1) throw Error(Errc::invalid_argument, "cot depth must be >= 1");
  if (params.x < 1) throw Error(Errc::invalid_argument, "cot x must be >= 1");
  if (params.th <= 0 || params.th > 100) throw Error(Errc::invalid_argument, "cot th must be in (0, 100]");

  ResolveResult result;
  result.order.resize(ranked.size());
  std::iota(result.order.begin(), result.order.end(), 0);
  const int required = required_matches(params.x, params.th, params.strict_greater);
  const int limit = std::min<int>(params.depth, static_cast<int>(ranked.size()));

  for (int i = 1; i < limit; ++i) {
    CotDecision d;
    d.incumbent = result.order[0];
    d.challenger = result.order[static_cast<std::size_t>(i)];
    d.required = required;
    const auto& top = ranked[static_cast<std::size_t>(d.incumbent)].cluster;
    const auto& challenger = ranked[static_cast<std::size_t>(d.challenger)].cluster;

    int case_index = 0;
    try {
      case_index = find_distinguishing_case(top, challenger);
    } catch (const Error& e) {
      d.note = std::string("skipped: ") + e.what();
      result.decisions.push_back(std::move(d));
      continue;
    }
    d.case_index = case_index;

    try {
      d.predictions = predict(case_index, params.x);
    } catch (const Error& e) {
      d.note = std::string("predictions unavailable: ") + e.what();
    }
    const auto& record = challenger.canonical_trace.records[static_cast<std::size_t>(case_index)];
    d.match_count = static_cast<int>(std::count_if(d.predictions.begin(), d.predictions.end(), [&](const auto& p) {
      return p.parsed && prediction_matches(*p.parsed, record, outputs);
    }));
    d.swap = d.match_count >= required;
    if (d.swap) std::swap(result.order[0], result.order[static_cast<std::size_t>(i)]);
    result.decisions.push_back(std::move(d));
  }
  return result;
}

ResolveResult resolve(const std::vector<ScoredCluster>& ranked, const Problem& problem,
                      const Testbench& testbench, const std::vector<TestCase>& test_cases,
                      const CotParams& params, Gateway& gateway) {
  const auto outputs = scan_interface(problem.module_interface).output_names();
  return resolve(ranked, outputs, params, [&](int case_index, int x) {
    const TestCase* tc = nullptr;
    for (const auto& c : test_cases)
      if (c.index == case_index) tc = &c;
    return reason_reference(problem, testbench, case_index, x, gateway, tc);
  });
}

}  // namespace vrank
