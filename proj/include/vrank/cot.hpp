#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vrank/model.hpp"

namespace vrank {

class Gateway;

/// Smallest case index where the canonical records of two ok clusters differ.
/// Throws Error{no_distinguishing_case} when either cluster failed or the
/// traces agree everywhere.
int find_distinguishing_case(const Cluster& a, const Cluster& b);

/// Attempts needed to back a challenger: ceil(th/100 * x), or the smallest
/// count strictly above th/100 * x when `strict_greater`.
int required_matches(int x, int th, bool strict_greater = false);

/// True when the parsed prediction gives, for every output field of
/// `record`, a value equal to it after canonicalization.
bool prediction_matches(const std::map<std::string, std::string>& prediction, const std::string& record,
                        const std::vector<std::string>& outputs);

/// Produces the x reference predictions for one comparison.
using PredictionSource =
    std::function<std::vector<ReferencePrediction>(int case_index, int x)>;

struct ResolveResult {
  std::vector<int> order;  // permutation of positions in the input ranking
  std::vector<CotDecision> decisions;
};

/// Cascading arbitration over the top `depth` clusters: the current top is
/// compared with the rank-2, then rank-3, ... cluster at their first differing
/// case; when enough predictions reproduce the challenger's outputs the two
/// swap places. Membership and scores are never touched.
ResolveResult resolve(const std::vector<ScoredCluster>& ranked, const std::vector<std::string>& outputs,
                      const CotParams& params, const PredictionSource& predict);

/// Same, drawing predictions from the gateway.
ResolveResult resolve(const std::vector<ScoredCluster>& ranked, const Problem& problem,
                      const Testbench& testbench, const std::vector<TestCase>& test_cases,
                      const CotParams& params, Gateway& gateway);

}  // namespace vrank
