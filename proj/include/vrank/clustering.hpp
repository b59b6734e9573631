#pragma once

#include <vector>

#include "vrank/model.hpp"

namespace vrank {

/// Partitions candidate indices 0..n-1 by exact trace equality. Ok traces with
/// identical record lists share a cluster; every non-ok trace becomes its own
/// failed singleton. Clusters come out ordered by their smallest member.
std::vector<Cluster> cluster(const std::vector<ExecutionTrace>& traces);

}  // namespace vrank
