#pragma once

#include <cstdint>
#include <vector>

#include "vrank/model.hpp"

namespace vrank {

/// 0 iff both traces are ok and agree on every record, else 1.
int strict_loss(const ExecutionTrace& a, const ExecutionTrace& b);

/// Fraction of the m cases whose records differ; 1 when either trace is not ok.
Score case_loss(const ExecutionTrace& a, const ExecutionTrace& b, int m);

/// Consistency score R(c) = n - sum over all c' (c itself included) of the
/// pairwise loss, shared by every member of a cluster. A failed candidate
/// loses 1 against everything, itself included, so it scores 0.
std::vector<ScoredCluster> score_clusters(const std::vector<Cluster>& clusters,
                                          const std::vector<ExecutionTrace>& traces, LossKind loss);

/// Descending score; ties go to the cluster with the smaller minimum member;
/// failed clusters always trail ok ones.
std::vector<ScoredCluster> rank(std::vector<ScoredCluster> scored);

/// At most k candidate indices, one per cluster in the given order.
/// Deterministic mode takes each cluster's smallest member; seeded-random
/// mode draws a member uniformly with a generator seeded by `seed`.
std::vector<int> select_representatives(const std::vector<ScoredCluster>& ranked, int k,
                                        RepresentativeMode mode = RepresentativeMode::deterministic,
                                        std::uint64_t seed = 0);

}  // namespace vrank
