#pragma once

#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv {

struct GreedyTrace {
  std::vector<Index> order;       // items, by decreasing value to the first agent
  std::vector<Index> recipients;  // recipient of order[s]
};

struct GreedyResult {
  IntegralAllocation allocation;
  GreedyTrace trace;
};

// Single agents, one copy per item, goods. Each item in turn goes to the agent
// whose bundle the first agent values least (ties to the smaller index).
GreedyResult greedy_allocate(const Instance& inst);

}  // namespace fairdiv
