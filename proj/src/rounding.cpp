#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "fairdiv/frobenius.hpp"
#include "fairdiv/lp.hpp"
#include "fairdiv/rounding.hpp"

namespace fairdiv {

namespace {

size_t u(Index i) { return static_cast<size_t>(i); }

// reach[r]: r is a nonnegative combination of sizes.
std::vector<char> reachable(const std::vector<Count>& sizes, Count limit) {
  std::vector<char> reach(static_cast<size_t>(limit + 1), 0);
  reach[0] = 1;
  for (Count r = 1; r <= limit; ++r)
    for (Count s : sizes)
      if (s <= r && reach[static_cast<size_t>(r - s)]) {
        reach[static_cast<size_t>(r)] = 1;
        break;
      }
  return reach;
}

// Normalized min-gap of each group under per-agent counts (exact).
VectorQ group_min_gaps(const Instance& inst, const MatrixI& counts, const VectorQ& norms) {
  const Index d = inst.groups(), t = inst.types();
  MatrixQ val(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      Rational s = 0;
      for (Index z = 0; z < t; ++z)
        if (counts(j, z) != 0) s += inst.value(i, z) * counts(j, z);
      val(i, j) = s;
    }
  VectorQ out(d);
  const bool goods = inst.kind() == Kind::Goods;
  for (Index i = 0; i < d; ++i) {
    bool first = true;
    Rational best = 0;
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      Rational g = goods ? val(i, i) - val(i, j) : val(i, j) - val(i, i);
      if (first || g < best) best = g;
      first = false;
    }
    out(i) = best / norms(i);
  }
  return out;
}

}  // namespace

EnvyRounding round_envy(const Instance& inst, const FractionalAllocation& fractional,
                        bool enforce_copies) {
  const Index d = inst.groups(), t = inst.types();
  const Thresholds th = thresholds(inst.group_sizes());
  for (Index z = 0; z < t && enforce_copies; ++z) {
    if (inst.copies(z) < th.theta || inst.copies(z) % th.g != 0)
      throw FairDivisionError(ErrorKind::Precondition,
                              "type " + std::to_string(z) + " has " + std::to_string(inst.copies(z)) +
                                  " copies; need a multiple of " + std::to_string(th.g) +
                                  " that is at least " + std::to_string(th.theta));
  }
  check_feasible(inst, fractional);

  EnvyRounding out;
  RoundingTrace& tr = out.trace;
  tr.input_min_gap = d >= 2 ? normalized_min_gap(inst, fractional) : 0;
  tr.initial_masses.resize(d, t);
  for (Index i = 0; i < d; ++i)
    tr.initial_masses.row(i) = fractional.shares.row(i) * static_cast<Real>(inst.size(i));

  // Phase 1: keep integral group masses, pool fractional parts and unused capacity.
  MatrixI mass(d, t);
  VectorI pool(t);
  for (Index z = 0; z < t; ++z) {
    Count used = 0;
    for (Index i = 0; i < d; ++i) {
      Real b = tr.initial_masses(i, z);
      const Real r = std::round(b);
      if (std::fabs(b - r) <= 1e-9L) b = r;
      mass(i, z) = std::max<Count>(0, static_cast<Count>(std::floor(b)));
      used += mass(i, z);
    }
    if (used > inst.copies(z))
      throw FairDivisionError(ErrorKind::Precondition,
                              "fractional allocation exceeds the copies of type " + std::to_string(z));
    pool(z) = inst.copies(z) - used;
  }
  tr.masses[0] = mass;
  tr.pools[0] = pool;

  // Phase 2: make each group mass a multiple of its size.
  tr.removed_phase2 = MatrixI::Zero(d, t);
  for (Index i = 0; i < d; ++i)
    for (Index z = 0; z < t; ++z) {
      const Count r = mass(i, z) % inst.size(i);
      mass(i, z) -= r;
      pool(z) += r;
      tr.removed_phase2(i, z) = r;
    }
  tr.masses[1] = mass;
  tr.pools[1] = pool;

  // Phase 3: top each pool up to theta by taking whole blocks from the largest holder.
  tr.removed_phase3 = MatrixI::Zero(d, t);
  for (Index z = 0; z < t; ++z)
    while (pool(z) < th.theta) {
      Index pick = -1;
      for (Index i = 0; i < d; ++i)
        if (mass(i, z) >= inst.size(i) && (pick < 0 || mass(i, z) > mass(pick, z))) pick = i;
      if (pick < 0 && !enforce_copies) break;
      if (pick < 0) throw FairDivisionError(ErrorKind::InvariantViolation, "no block left to pool");
      mass(pick, z) -= inst.size(pick);
      pool(z) += inst.size(pick);
      tr.removed_phase3(pick, z) += inst.size(pick);
    }
  tr.masses[2] = mass;
  tr.pools[2] = pool;
  tr.pooled_mass = pool.sum();

  const Count n = inst.agents(), nd = inst.size(d - 1);
  tr.stated_constant = static_cast<Count>(d * (d - 1)) + t * (th.theta + n + nd - d - 1);
  tr.adjusted_constant = tr.stated_constant + t;
  tr.pooled_within_bound = tr.pooled_mass <= tr.adjusted_constant;

  // Surplus distribution.
  MatrixI counts(d, t);
  for (Index i = 0; i < d; ++i)
    for (Index z = 0; z < t; ++z) counts(i, z) = mass(i, z) / inst.size(i);
  VectorQ norms(d);
  for (Index i = 0; i < d; ++i) norms(i) = row_norm_l1(inst, i);
  tr.blocks = MatrixI::Zero(d, t);
  const bool goods = inst.kind() == Kind::Goods;
  for (Index z = 0; z < t; ++z) {
    if (pool(z) % th.g != 0 || !decompose(inst.group_sizes(), pool(z)))
      throw FairDivisionError(enforce_copies ? ErrorKind::InvariantViolation : ErrorKind::Precondition,
                              "pooled mass " + std::to_string(pool(z)) + " of type " +
                                  std::to_string(z) + " is not representable");
    const std::vector<char> reach = reachable(inst.group_sizes(), pool(z));
    Count remaining = pool(z);
    while (remaining > 0) {
      const VectorQ gaps = group_min_gaps(inst, counts, norms);
      Index pick = -1;
      for (Index i = 0; i < d; ++i) {
        const Count rest = remaining - inst.size(i);
        if (rest < 0 || !reach[static_cast<size_t>(rest)]) continue;
        if (pick < 0 || (goods ? gaps(i) < gaps(pick) : gaps(i) > gaps(pick))) pick = i;
      }
      if (pick < 0) throw FairDivisionError(ErrorKind::InvariantViolation, "surplus got stuck");
      counts(pick, z) += 1;
      tr.blocks(pick, z) += 1;
      remaining -= inst.size(pick);
    }
  }
  tr.extra_copies = tr.blocks;

  for (int p = 0; p < 3; ++p)
    for (Index z = 0; z < t; ++z)
      tr.conserved = tr.conserved && tr.masses[static_cast<size_t>(p)].col(z).sum() +
                                             tr.pools[static_cast<size_t>(p)](z) ==
                                         inst.copies(z);

  out.allocation.counts = counts;
  check_complete(inst, out.allocation);
  if (!tr.conserved) throw FairDivisionError(ErrorKind::InvariantViolation, "mass not conserved");

  // Each agent loses at most the pooled mass from its own bundle and sees at
  // most the pooled mass added to another one.
  if (d >= 2) {
    const GapReport gaps = gap_report(inst, out.allocation);
    for (Index i = 0; i < d; ++i) {
      const Real norm = goods ? row_norm(inst, i, Norm::L2) : row_norm(inst, i, Norm::L1);
      Rational vmax = 0;
      for (Index z = 0; z < t; ++z) vmax = std::max(vmax, inst.value(i, z));
      const Real lost = 2 * static_cast<Real>(tr.pooled_mass) * to_real(vmax);
      const Real floor_gap = norm * tr.input_min_gap - lost;
      for (Index j = 0; j < d; ++j) {
        if (i == j) continue;
        const Real have = to_real(gaps.pair_gaps(i, j));
        if (have < floor_gap - 1e-9L * std::max<Real>(1, std::fabs(floor_gap)))
          throw FairDivisionError(ErrorKind::InvariantViolation,
                                  "rounding lost more gap than the pooled mass allows");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Graph {
  // nodes: agents 0..n-1, items n..n+m-1
  Index n = 0, m = 0;
  std::vector<std::vector<Index>> adj;
};

Graph fractional_graph(const MatrixQ& x) {
  Graph g;
  g.n = x.rows();
  g.m = x.cols();
  g.adj.assign(u(g.n + g.m), {});
  for (Index i = 0; i < g.n; ++i)
    for (Index j = 0; j < g.m; ++j)
      if (x(i, j) > 0 && x(i, j) < 1) {
        g.adj[u(i)].push_back(g.n + j);
        g.adj[u(g.n + j)].push_back(i);
      }
  return g;
}

// Returns a cycle as an alternating node list starting at an agent, or empty.
std::vector<Index> find_cycle(const Graph& g) {
  const Index total = g.n + g.m;
  std::vector<Index> parent(u(total), -2);
  std::vector<Index> depth(u(total), 0);
  for (Index root = 0; root < total; ++root) {
    if (parent[u(root)] != -2) continue;
    parent[u(root)] = -1;
    std::vector<std::pair<Index, size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      if (k == g.adj[u(v)].size()) {
        stack.pop_back();
        continue;
      }
      const Index w = g.adj[u(v)][k++];
      if (w == parent[u(v)]) continue;
      if (parent[u(w)] == -2) {
        parent[u(w)] = v;
        depth[u(w)] = depth[u(v)] + 1;
        stack.emplace_back(w, 0);
        continue;
      }
      // Back edge v -> w with w an ancestor of v: the tree path plus this edge.
      if (depth[u(w)] >= depth[u(v)]) continue;
      std::vector<Index> cyc;
      for (Index c = v; c != w; c = parent[u(c)]) cyc.push_back(c);
      cyc.push_back(w);
      auto start = std::find_if(cyc.begin(), cyc.end(), [&](Index c) { return c < g.n; });
      std::rotate(cyc.begin(), start, cyc.end());
      return cyc;
    }
  }
  return {};
}

}  // namespace

ProportionalRounding round_proportional(const Instance& inst, const FractionalAllocation& fractional) {
  if (!inst.single_agent_groups() || !inst.unit_copies())
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            "proportional rounding needs single agents and one copy per item");
  const Index n = inst.groups(), m = inst.types();
  if (fractional.shares.rows() != n || fractional.shares.cols() != m)
    throw FairDivisionError(ErrorKind::DimensionMismatch, "allocation shape does not match");
  const bool goods = inst.kind() == Kind::Goods;
  const MatrixQ& v = inst.values();

  MatrixQ x(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) {
      Real s = fractional.shares(i, j);
      if (!std::isfinite(s) || s < -1e-9L || s > 1 + 1e-9L)
        throw FairDivisionError(ErrorKind::Precondition, "shares must lie in [0, 1]");
      if (s <= 1e-12L) s = 0;
      if (s >= 1 - 1e-12L) s = 1;
      x(i, j) = to_rational(s);
    }

  // Clean up to an exactly feasible allocation.
  for (Index j = 0; j < m; ++j) {
    Rational sum = 0;
    for (Index i = 0; i < n; ++i) sum += x(i, j);
    if (goods) {
      if (sum > 1)
        for (Index i = 0; i < n; ++i) x(i, j) /= sum;
      // Shares held by agents who do not value the item move to one who does.
      Index keeper = -1;
      for (Index i = 0; i < n; ++i)
        if (x(i, j) > 0 && v(i, j) > 0) {
          keeper = i;
          break;
        }
      if (keeper < 0) {
        for (Index i = 0; i < n; ++i)
          if (x(i, j) > 0) {
            keeper = i;
            break;
          }
      }
      if (keeper < 0) continue;
      for (Index i = 0; i < n; ++i)
        if (i != keeper && x(i, j) > 0 && v(i, j) == 0) {
          x(keeper, j) += x(i, j);
          x(i, j) = 0;
        }
    } else {
      if (sum == 0) {
        Index best = 0;
        for (Index i = 1; i < n; ++i)
          if (v(i, j) < v(best, j)) best = i;
        x(best, j) = 1;
        continue;
      }
      if (sum != 1) {
        Index big = 0;
        for (Index i = 1; i < n; ++i)
          if (x(i, j) > x(big, j)) big = i;
        x(big, j) += 1 - sum;
        if (x(big, j) < 0)
          throw FairDivisionError(ErrorKind::Precondition, "chore shares do not sum to one");
      }
    }
  }

  ProportionalRounding out;
  out.fractional_value.resize(n);
  for (Index i = 0; i < n; ++i) {
    Rational s = 0;
    for (Index j = 0; j < m; ++j)
      if (x(i, j) != 0) s += v(i, j) * x(i, j);
    out.fractional_value(i) = s;
  }

  // Cancel cycles among fractional edges. Every agent but the first on the
  // cycle keeps its value; the first one does not get worse.
  for (;;) {
    const Graph g = fractional_graph(x);
    const std::vector<Index> cyc = find_cycle(g);
    if (cyc.empty()) break;
    const size_t len = cyc.size() / 2;
    std::vector<Index> agent(len), item(len);
    for (size_t l = 0; l < len; ++l) {
      agent[l] = cyc[2 * l];
      item[l] = cyc[2 * l + 1] - n;
    }
    // agent[l] gains e[l] of item[l]; agent[l+1] gives up e[l] of item[l].
    std::vector<Rational> e(len);
    e[0] = 1;
    for (size_t l = 0; l + 1 < len; ++l)
      e[l + 1] = e[l] * v(agent[l + 1], item[l]) / v(agent[l + 1], item[l + 1]);
    const Rational first = e[0] * v(agent[0], item[0]) - e[len - 1] * v(agent[0], item[len - 1]);
    if (goods ? first < 0 : first > 0)
      for (auto& q : e) q = -q;
    bool have = false;
    Rational step = 0;
    for (size_t l = 0; l < len; ++l) {
      const Index up = agent[l], down = agent[(l + 1) % len];
      const Index j = item[l];
      if (e[l] > 0) {
        const Rational r = x(down, j) / e[l];
        if (!have || r < step) step = r;
      } else {
        const Rational r = x(up, j) / -e[l];
        if (!have || r < step) step = r;
      }
      have = true;
    }
    for (size_t l = 0; l < len; ++l) {
      const Index up = agent[l], down = agent[(l + 1) % len];
      const Index j = item[l];
      x(up, j) += step * e[l];
      x(down, j) -= step * e[l];
    }
    ++out.cycles_cancelled;
  }

  // Round the remaining forest.
  MatrixI counts = MatrixI::Zero(n, m);
  std::vector<char> assigned(u(m), 0);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i)
      if (x(i, j) == 1) {
        counts(i, j) = 1;
        assigned[u(j)] = 1;
      }
  const Graph g = fractional_graph(x);
  std::vector<Index> parent(u(n + m), -2);
  for (Index root = 0; root < n; ++root) {
    if (parent[u(root)] != -2 || g.adj[u(root)].empty()) continue;
    parent[u(root)] = -1;
    std::queue<Index> q;
    q.push(root);
    while (!q.empty()) {
      const Index vtx = q.front();
      q.pop();
      std::vector<Index> next = g.adj[u(vtx)];
      std::sort(next.begin(), next.end());
      for (Index w : next) {
        if (w == parent[u(vtx)] || parent[u(w)] != -2) continue;
        parent[u(w)] = vtx;
        q.push(w);
      }
      if (vtx >= n) {
        const Index j = vtx - n;
        Index to = parent[u(vtx)];
        if (!goods)
          for (Index w : next)
            if (w != parent[u(vtx)] && parent[u(w)] == vtx) {
              to = w;
              break;
            }
        counts(to, j) = 1;
        assigned[u(j)] = 1;
      }
    }
  }
  for (Index j = 0; j < m; ++j)
    if (!assigned[u(j)]) {
      Index best = 0;
      for (Index i = 1; i < n; ++i)
        if (goods ? v(i, j) > v(best, j) : v(i, j) < v(best, j)) best = i;
      counts(best, j) = 1;
    }

  out.allocation.counts = counts;
  check_complete(inst, out.allocation);
  out.integral_value.resize(n);
  for (Index i = 0; i < n; ++i) {
    Rational s = 0, vmax = 0;
    for (Index j = 0; j < m; ++j) {
      if (counts(i, j)) s += v(i, j);
      vmax = std::max(vmax, v(i, j));
    }
    out.integral_value(i) = s;
    const bool ok = goods ? s >= out.fractional_value(i) - vmax : s <= out.fractional_value(i) + vmax;
    if (!ok)
      throw FairDivisionError(ErrorKind::InvariantViolation,
                              "rounding moved agent " + std::to_string(i) + " by more than one item");
  }
  return out;
}

}  // namespace fairdiv
