#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "fairdiv/lp.hpp"

namespace fairdiv {

namespace {

Index x_index(Index i, Index z, Index t) { return 1 + i * t + z; }

MatrixR gap_coefficients(const Instance& inst, Kind kind) {
  return kind == Kind::Goods ? normalized(inst, Norm::L2) : normalized(inst, Norm::L1);
}

void require_prop_scope(const Instance& inst, Kind kind) {
  if (inst.kind() != kind)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "LP kind does not match the instance");
  if (!inst.single_agent_groups() || !inst.unit_copies())
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            "proportionality LP needs single-agent groups and one copy per type");
}

// Maximizes allocated mass subject to every gap staying at least alpha.
std::optional<MatrixR> fill_capacity(const Instance& inst, Real alpha) {
  const Index d = inst.groups(), t = inst.types();
  const MatrixR a = gap_coefficients(inst, inst.kind());
  const Real s = inst.kind() == Kind::Goods ? 1 : -1;
  LinearProgram lp(Sense::Maximize, d * t, d * (d - 1) + t);
  const Real floor_alpha = alpha - 1e-12L * std::max<Real>(1, std::fabs(alpha));
  Index r = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      for (Index z = 0; z < t; ++z) {
        lp.rows(r, i * t + z) += s * a(i, z);
        lp.rows(r, j * t + z) -= s * a(i, z);
      }
      lp.set_row(r++, Relation::GreaterEqual, floor_alpha);
    }
  for (Index z = 0; z < t; ++z) {
    for (Index i = 0; i < d; ++i) {
      lp.rows(r, i * t + z) = static_cast<Real>(inst.size(i));
      lp.objective(i * t + z) = static_cast<Real>(inst.size(i));
    }
    lp.set_row(r++, Relation::LessEqual, static_cast<Real>(inst.copies(z)));
  }
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  MatrixR x(d, t);
  for (Index i = 0; i < d; ++i)
    for (Index z = 0; z < t; ++z) x(i, z) = sol.variable_values(i * t + z);
  return x;
}

}  // namespace

LinearProgram build_gap_lp(const Instance& inst, Kind kind) {
  if (inst.kind() != kind)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "LP kind does not match the instance");
  const Index d = inst.groups(), t = inst.types();
  const MatrixR a = gap_coefficients(inst, kind);
  LinearProgram lp(Sense::Maximize, 1 + d * t, d * (d - 1) + t);
  lp.objective(0) = 1;
  Index r = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      // alpha <= sum_z a_iz (x_iz - x_jz)   (goods; chores swap the sign)
      const Real s = kind == Kind::Goods ? 1 : -1;
      lp.rows(r, 0) = 1;
      for (Index z = 0; z < t; ++z) {
        lp.rows(r, x_index(i, z, t)) -= s * a(i, z);
        lp.rows(r, x_index(j, z, t)) += s * a(i, z);
      }
      lp.set_row(r++, Relation::LessEqual, 0);
    }
  for (Index z = 0; z < t; ++z) {
    for (Index i = 0; i < d; ++i) lp.rows(r, x_index(i, z, t)) = static_cast<Real>(inst.size(i));
    lp.set_row(r++, Relation::LessEqual, static_cast<Real>(inst.copies(z)));
  }
  return lp;
}

FractionalAllocation gap_lp_allocation(const Instance& inst, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal)
    throw FairDivisionError(ErrorKind::Precondition, "LP solution is not optimal");
  const Index d = inst.groups(), t = inst.types();
  if (sol.variable_values.size() != 1 + d * t)
    throw FairDivisionError(ErrorKind::DimensionMismatch, "solution does not match the gap LP");
  FractionalAllocation out;
  out.shares.resize(d, t);
  for (Index i = 0; i < d; ++i)
    for (Index z = 0; z < t; ++z) out.shares(i, z) = sol.variable_values(x_index(i, z, t));
  return out;
}

LinearProgram build_prop_lp(const Instance& inst, Kind kind) {
  require_prop_scope(inst, kind);
  const Index n = inst.groups(), m = inst.types();
  const MatrixR a = normalized(inst, Norm::L1);
  const bool goods = kind == Kind::Goods;
  LinearProgram lp(goods ? Sense::Maximize : Sense::Minimize, 1 + n * m, n + m);
  lp.objective(0) = 1;
  for (Index i = 0; i < n; ++i) {
    lp.rows(i, 0) = 1;
    for (Index j = 0; j < m; ++j) lp.rows(i, x_index(i, j, m)) = -a(i, j);
    lp.set_row(i, goods ? Relation::LessEqual : Relation::GreaterEqual, 0);
  }
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) lp.rows(n + j, x_index(i, j, m)) = 1;
    lp.set_row(n + j, goods ? Relation::LessEqual : Relation::Equal, 1);
  }
  return lp;
}

FractionalAllocation prop_lp_allocation(const Instance& inst, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal)
    throw FairDivisionError(ErrorKind::Precondition, "LP solution is not optimal");
  const Index n = inst.groups(), m = inst.types();
  if (sol.variable_values.size() != 1 + n * m)
    throw FairDivisionError(ErrorKind::DimensionMismatch, "solution does not match the prop LP");
  FractionalAllocation out;
  out.shares.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) out.shares(i, j) = sol.variable_values(x_index(i, j, m));
  out.complete = inst.kind() == Kind::Chores;
  return out;
}

SparseAllocation sparsify_to_vertex(const LpSolution& sol, const Instance& inst) {
  const Index d = inst.groups(), t = inst.types();
  SparseAllocation out;
  out.allocation = gap_lp_allocation(inst, sol);
  MatrixR& x = out.allocation.shares;
  for (Index i = 0; i < d; ++i)
    for (Index z = 0; z < t; ++z) {
      const Real zero_tol = 1e-12L * std::max<Real>(1, static_cast<Real>(inst.copies(z)));
      if (x(i, z) <= zero_tol) x(i, z) = 0;
    }

  const Index rows = d * (d - 1) + t;
  Index positive = 0;
  for (Index i = 0; i < d; ++i)
    for (Index z = 0; z < t; ++z)
      if (x(i, z) > 0) ++positive;
  const Index alpha_positive = sol.variable_values(0) > 1e-12L ? 1 : 0;
  if (positive + alpha_positive > rows)
    throw FairDivisionError(ErrorKind::Precondition,
                            "LP solution is not basic: " + std::to_string(positive) +
                                " positive shares for " + std::to_string(rows) + " constraints");
  if (positive > t + d * (d - 1))
    throw FairDivisionError(ErrorKind::InvariantViolation, "support exceeds the vertex bound");
  out.positive_variables = positive;

  auto leftover = [&](Index z) {
    Real used = 0;
    for (Index i = 0; i < d; ++i) used += static_cast<Real>(inst.size(i)) * x(i, z);
    return static_cast<Real>(inst.copies(z)) - used;
  };
  std::vector<bool> slack(static_cast<size_t>(t), false);
  bool any_slack = false;
  for (Index z = 0; z < t; ++z) {
    slack[static_cast<size_t>(z)] = leftover(z) > 1e-12L * static_cast<Real>(inst.copies(z));
    any_slack = any_slack || slack[static_cast<size_t>(z)];
  }
  if (any_slack) {
    // Another vertex with the same min-gap that uses as much capacity as possible.
    if (auto filled = fill_capacity(inst, sol.variable_values(0))) {
      x = *filled;
      positive = 0;
      for (Index i = 0; i < d; ++i)
        for (Index z = 0; z < t; ++z) {
          if (x(i, z) <= 1e-12L * std::max<Real>(1, static_cast<Real>(inst.copies(z)))) x(i, z) = 0;
          if (x(i, z) > 0) ++positive;
        }
      out.positive_variables = positive;
    }
    // Whatever is still unused is split evenly over all agents, which leaves every gap unchanged.
    const Real n = static_cast<Real>(inst.agents());
    for (Index z = 0; z < t; ++z) {
      const Real left = leftover(z);
      if (left > 0) x.col(z).array() += left / n;
      if (slack[static_cast<size_t>(z)]) ++out.completed_types;
    }
  }
  out.allocation.complete = true;

  for (Index z = 0; z < t; ++z)
    for (Index i = 0; i < d; ++i) {
      const Real mass = static_cast<Real>(inst.size(i)) * x(i, z);
      if (std::fabs(mass - std::round(mass)) > 1e-9L) {
        ++out.shared_type_count;
        break;
      }
    }
  return out;
}

Real normalized_min_gap(const Instance& inst, const FractionalAllocation& alloc) {
  const bool goods = inst.kind() == Kind::Goods;
  const MatrixR a = gap_coefficients(inst, inst.kind());
  const MatrixR val = a * alloc.shares.transpose();
  Real best = std::numeric_limits<Real>::infinity();
  for (Index i = 0; i < inst.groups(); ++i)
    for (Index j = 0; j < inst.groups(); ++j)
      if (i != j) best = std::min(best, goods ? val(i, i) - val(i, j) : val(i, j) - val(i, i));
  return inst.groups() < 2 ? 0 : best;
}

// ---------------------------------------------------------------------------
// Edge generation for the proportionality LP.
//
// The dual asks for agent weights w on the simplex; item j is then priced at
// the best w_i a_ij. Items with a clear winner are fixed to it, the rest go into
// a small LP over their candidate edges, and edges that violate the prices of
// that LP are added until none is left.

namespace {

// Approximate dual weights by mirror descent on sum_j best_i w_i a_ij.
VectorR initial_weights(const MatrixR& a, bool goods) {
  const Index n = a.rows(), m = a.cols();
  VectorR w = VectorR::Constant(n, Real(1) / static_cast<Real>(n));
  VectorR best_w = w;
  Real best_f = goods ? std::numeric_limits<Real>::infinity() : -std::numeric_limits<Real>::infinity();
  VectorR load(n);
  for (int it = 1; it <= 2000; ++it) {
    load.setZero();
    Real f = 0;
    for (Index j = 0; j < m; ++j) {
      Index pick = 0;
      for (Index i = 1; i < n; ++i) {
        const Real cand = w(i) * a(i, j), cur = w(pick) * a(pick, j);
        if (goods ? cand > cur : cand < cur) pick = i;
      }
      load(pick) += a(pick, j);
      f += w(pick) * a(pick, j);
    }
    if (goods ? f < best_f : f > best_f) {
      best_f = f;
      best_w = w;
    }
    const Real mean = load.mean();
    if (mean <= 0) break;
    const Real step = 2 / std::sqrt(static_cast<Real>(it));
    // Agents that get too much lose weight (goods); too much cost gains weight (chores).
    for (Index i = 0; i < n; ++i) w(i) *= std::exp((goods ? -step : step) * (load(i) / mean - 1));
    w /= w.sum();
  }
  return best_w;
}

struct EdgeSet {
  std::vector<std::vector<Index>> agents;  // candidate agents per item
};

EdgeSet initial_edges(const MatrixR& a, const VectorR& w, bool goods, Real window) {
  const Index n = a.rows(), m = a.cols();
  EdgeSet e;
  e.agents.resize(static_cast<size_t>(m));
  for (Index j = 0; j < m; ++j) {
    Real best = w(0) * a(0, j);
    for (Index i = 1; i < n; ++i) best = goods ? std::max(best, w(i) * a(i, j)) : std::min(best, w(i) * a(i, j));
    for (Index i = 0; i < n; ++i) {
      const Real wa = w(i) * a(i, j);
      if (goods ? wa >= best * (1 - window) : wa <= best * (1 + window)) e.agents[static_cast<size_t>(j)].push_back(i);
    }
  }
  return e;
}

struct Restricted {
  LpSolution sol;
  VectorR weights;
  std::vector<std::pair<Index, Index>> var_edge;  // variable -> (agent, item)
};

Restricted solve_restricted(const MatrixR& a, const EdgeSet& edges, bool goods) {
  const Index n = a.rows(), m = a.cols();
  VectorR fixed = VectorR::Zero(n);
  std::vector<Index> shared;
  for (Index j = 0; j < m; ++j) {
    const auto& c = edges.agents[static_cast<size_t>(j)];
    if (c.size() == 1) fixed(c[0]) += a(c[0], j);
    else shared.push_back(j);
  }
  Index nvar = 1;
  for (Index j : shared) nvar += static_cast<Index>(edges.agents[static_cast<size_t>(j)].size());
  LinearProgram lp(goods ? Sense::Maximize : Sense::Minimize, nvar, n + static_cast<Index>(shared.size()));
  lp.objective(0) = 1;
  for (Index i = 0; i < n; ++i) {
    lp.rows(i, 0) = 1;
    lp.set_row(i, goods ? Relation::LessEqual : Relation::GreaterEqual, fixed(i));
  }
  Restricted out;
  out.var_edge.emplace_back(-1, -1);
  Index col = 1;
  for (size_t s = 0; s < shared.size(); ++s) {
    const Index j = shared[s];
    const Index r = n + static_cast<Index>(s);
    for (Index i : edges.agents[static_cast<size_t>(j)]) {
      lp.rows(i, col) = -a(i, j);
      lp.rows(r, col) = 1;
      out.var_edge.emplace_back(i, j);
      ++col;
    }
    lp.set_row(r, goods ? Relation::LessEqual : Relation::Equal, 1);
  }
  out.sol = solve(lp);
  if (out.sol.status != LpStatus::Optimal)
    throw FairDivisionError(ErrorKind::InvariantViolation, "restricted proportionality LP is not optimal");
  out.weights = out.sol.duals.head(n).cwiseAbs();
  const Real total = out.weights.sum();
  if (total <= 0) throw FairDivisionError(ErrorKind::InvariantViolation, "degenerate agent multipliers");
  out.weights /= total;
  return out;
}

LpSolution structured_prop(const Instance& inst) {
  const bool goods = inst.kind() == Kind::Goods;
  const Index n = inst.groups(), m = inst.types();
  const MatrixR a = normalized(inst, Norm::L1);

  VectorR center = initial_weights(a, goods);
  EdgeSet edges = initial_edges(a, center, goods, 2e-3L);

  // Prices under weights v; with grow set, the best outside agent is added wherever it beats the candidates.
  auto price_items = [&](const VectorR& v, bool grow, VectorR& price) {
    bool added = false;
    for (Index j = 0; j < m; ++j) {
      auto& c = edges.agents[static_cast<size_t>(j)];
      Real own = v(c[0]) * a(c[0], j);
      for (Index i : c) own = goods ? std::max(own, v(i) * a(i, j)) : std::min(own, v(i) * a(i, j));
      Real best = own;
      Index winner = -1;
      for (Index i = 0; i < n; ++i) {
        const Real x = v(i) * a(i, j);
        if (goods ? x > best : x < best) best = x, winner = i;
      }
      price(j) = best;
      const Real slack = 1e-12L * std::max<Real>(best, 1e-300L);
      if (!grow || winner < 0 || (goods ? best <= own + slack : best >= own - slack)) continue;
      if (std::find(c.begin(), c.end(), winner) == c.end()) {
        c.push_back(winner);
        added = true;
      }
    }
    return added;
  };
  // The dual minimizes the price sum for goods and maximizes it for chores.
  auto better = [&](Real x, Real y) { return goods ? x < y : x > y; };
  VectorR price(m);
  price_items(center, false, price);
  Real center_bound = price.sum();

  Restricted rs;
  Real dual = 0, gap = 0;
  for (int round = 0;; ++round) {
    if (round > 500) throw FairDivisionError(ErrorKind::CyclingGuard, "edge generation did not converge");
    rs = solve_restricted(a, edges, goods);
    const VectorR& w = rs.weights;
    price_items(w, false, price);
    dual = price.sum();
    gap = std::fabs(rs.sol.objective_value - dual) / std::max<Real>(1, std::fabs(rs.sol.objective_value));
    if (better(dual, center_bound)) {
      center = w;
      center_bound = dual;
    }
    if (gap <= 1e-13L) break;
    // Smoothed prices first; the restricted duals alone put zero weight on slack agents.
    VectorR scratch(m);
    const VectorR smooth = (w + center) / 2;
    if (price_items(smooth, true, scratch)) continue;
    if (price_items(w, true, scratch)) continue;
    break;
  }
  const VectorR& w = rs.weights;
  const Real alpha = rs.sol.objective_value;
  LpSolution out;
  out.status = LpStatus::Optimal;
  out.iterations = rs.sol.iterations;
  out.variable_values = VectorR::Zero(1 + n * m);
  out.variable_values(0) = alpha;
  for (Index j = 0; j < m; ++j)
    if (edges.agents[static_cast<size_t>(j)].size() == 1)
      out.variable_values(x_index(edges.agents[static_cast<size_t>(j)][0], j, m)) = 1;
  for (Index v = 1; v < static_cast<Index>(rs.var_edge.size()); ++v) {
    auto [i, j] = rs.var_edge[static_cast<size_t>(v)];
    out.variable_values(x_index(i, j, m)) = rs.sol.variable_values(v);
  }
  out.objective_value = alpha;
  for (Index v = 0; v < out.variable_values.size(); ++v)
    if (out.variable_values(v) > 0) out.basis.push_back(v);

  // Certificate for the full LP: agent multipliers w, item prices.
  out.duals.resize(n + m);
  out.duals.head(n) = w;
  out.duals.tail(m) = price;
  out.dual_objective = dual;
  out.duality_gap = gap;
  Real infeas = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      infeas = std::max(infeas, goods ? w(i) * a(i, j) - price(j) : price(j) - w(i) * a(i, j));
  out.dual_infeasibility = std::max<Real>(infeas, std::fabs(w.sum() - 1));

  Real resid = 0;
  for (Index j = 0; j < m; ++j) {
    Real s = 0;
    for (Index i = 0; i < n; ++i) s += out.variable_values(x_index(i, j, m));
    resid = std::max(resid, goods ? s - 1 : std::fabs(s - 1));
  }
  for (Index i = 0; i < n; ++i) {
    Real u = 0;
    for (Index j = 0; j < m; ++j) u += a(i, j) * out.variable_values(x_index(i, j, m));
    resid = std::max(resid, goods ? out.objective_value - u : u - out.objective_value);
  }
  out.primal_residual = std::max<Real>(resid, 0);
  return out;
}

}  // namespace

LpSolution solve_prop_lp(const Instance& inst, const PropLpOptions& options) {
  require_prop_scope(inst, inst.kind());
  const Index vars = 1 + inst.groups() * inst.types();
  if (!options.force_structured && vars <= options.dense_variable_limit)
    return solve(build_prop_lp(inst));
  return structured_prop(inst);
}

}  // namespace fairdiv
