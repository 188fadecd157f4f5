#include <algorithm>
#include <numeric>

#include "fairdiv/greedy.hpp"

namespace fairdiv {

GreedyResult greedy_allocate(const Instance& inst) {
  if (inst.kind() != Kind::Goods || !inst.single_agent_groups() || !inst.unit_copies())
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            "greedy allocation needs goods, single agents and one copy per item");
  const Index n = inst.groups(), m = inst.types();
  GreedyResult out;
  auto& order = out.trace.order;
  order.resize(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return inst.value(0, a) > inst.value(0, b); });

  out.allocation.counts = MatrixI::Zero(n, m);
  std::vector<Rational> seen(static_cast<size_t>(n), Rational(0));  // first agent's value of each bundle
  for (Index j : order) {
    Index to = 0;
    for (Index i = 1; i < n; ++i)
      if (seen[static_cast<size_t>(i)] < seen[static_cast<size_t>(to)]) to = i;
    out.allocation.counts(to, j) = 1;
    seen[static_cast<size_t>(to)] += inst.value(0, j);
    out.trace.recipients.push_back(to);
  }
  return out;
}

}  // namespace fairdiv
