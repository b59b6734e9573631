#include "vrank/clustering.hpp"

#include <map>

namespace vrank {

std::vector<Cluster> cluster(const std::vector<ExecutionTrace>& traces) {
  std::vector<Cluster> clusters;
  std::map<std::vector<std::string>, std::size_t> by_records;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& trace = traces[i];
    const int index = static_cast<int>(i);
    if (!trace.ok()) {
      clusters.push_back(Cluster{{index}, trace, true});
      continue;
    }
    auto [it, inserted] = by_records.try_emplace(trace.records, clusters.size());
    if (inserted) {
      clusters.push_back(Cluster{{index}, trace, false});
    } else {
      clusters[it->second].members.push_back(index);
    }
  }
  return clusters;
}

}  // namespace vrank
