#include "vrank/scoring.hpp"

#include <algorithm>
#include <random>

#include "vrank/error.hpp"

namespace vrank {

int strict_loss(const ExecutionTrace& a, const ExecutionTrace& b) {
  if (!a.ok() || !b.ok()) return 1;
  return a.records == b.records ? 0 : 1;
}

Score case_loss(const ExecutionTrace& a, const ExecutionTrace& b, int m) {
  if (m < 1) throw Error(Errc::invalid_argument, "case_loss needs m >= 1");
  if (!a.ok() || !b.ok()) return Score(1);
  if (a.records.size() != static_cast<std::size_t>(m) || b.records.size() != static_cast<std::size_t>(m))
    return Score(1);
  std::int64_t differing = 0;
  for (int t = 0; t < m; ++t) differing += a.records[t] != b.records[t] ? 1 : 0;
  return Score(differing, m);
}

std::vector<ScoredCluster> score_clusters(const std::vector<Cluster>& clusters,
                                          const std::vector<ExecutionTrace>& traces, LossKind loss) {
  const auto n = static_cast<std::int64_t>(traces.size());
  int m = 0;
  for (const auto& t : traces) {
    if (t.ok()) {
      m = static_cast<int>(t.records.size());
      break;
    }
  }

  std::vector<ScoredCluster> scored;
  scored.reserve(clusters.size());
  for (const auto& c : clusters) {
    const auto& trace = traces.at(static_cast<std::size_t>(c.min_member()));
    Score total_loss(0);
    for (const auto& other : traces) {
      if (loss == LossKind::strict || m == 0) {
        total_loss += strict_loss(trace, other);
      } else {
        total_loss += case_loss(trace, other, m);
      }
    }
    scored.push_back(ScoredCluster{c, Score(n) - total_loss});
  }
  return scored;
}

std::vector<ScoredCluster> rank(std::vector<ScoredCluster> scored) {
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredCluster& a, const ScoredCluster& b) {
    if (a.cluster.failed != b.cluster.failed) return !a.cluster.failed;
    if (a.score != b.score) return a.score > b.score;
    return a.cluster.min_member() < b.cluster.min_member();
  });
  return scored;
}

std::vector<int> select_representatives(const std::vector<ScoredCluster>& ranked, int k,
                                        RepresentativeMode mode, std::uint64_t seed) {
  if (k < 1) throw Error(Errc::invalid_argument, "select_representatives needs k >= 1");
  std::mt19937_64 rng(seed);
  std::vector<int> picks;
  for (const auto& s : ranked) {
    if (static_cast<int>(picks.size()) == k) break;
    const auto& members = s.cluster.members;
    if (mode == RepresentativeMode::deterministic) {
      picks.push_back(*std::min_element(members.begin(), members.end()));
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      picks.push_back(members[pick(rng)]);
    }
  }
  return picks;
}

}  // namespace vrank
