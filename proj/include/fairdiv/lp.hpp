#pragma once

#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Unbounded, Infeasible };

const char* to_string(LpStatus status);

/// Dense LP over nonnegative variables: optimize objective . x subject to
/// rows(r, :) . x  (relations[r])  rhs(r).
struct LinearProgram {
  Sense sense = Sense::Maximize;
  VectorR objective;
  MatrixR rows;
  std::vector<Relation> relations;
  VectorR rhs;

  LinearProgram() = default;
  LinearProgram(Sense s, Index variables, Index constraints);

  Index variables() const { return objective.size(); }
  Index constraints() const { return rows.rows(); }
  void set_row(Index r, Relation rel, Real bound) {
    relations[static_cast<size_t>(r)] = rel;
    rhs(r) = bound;
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Real objective_value = 0;
  VectorR variable_values;
  // Basic columns; indices >= variables() refer to slack, surplus or artificial columns.
  std::vector<Index> basis;
  // One multiplier per constraint, signed for the problem as posed.
  VectorR duals;
  Real dual_objective = 0;
  Real duality_gap = 0;  // |primal - dual| / max(1, |primal|)
  Real dual_infeasibility = 0;
  Real primal_residual = 0;
  long iterations = 0;

  bool certified(Real tol = 1e-6L) const {
    return status == LpStatus::Optimal && duality_gap <= tol && dual_infeasibility <= 1e-9L &&
           primal_residual <= 1e-9L;
  }
};

struct SolverOptions {
  Real pivot_tolerance = 1e-12L;
  long max_iterations = 0;  // 0: derived from the problem size
};

// Two-phase dense tableau simplex with Bland's rule.
LpSolution solve(const LinearProgram& lp, const SolverOptions& options = {});

// Gap LP: variable 0 is the min-gap, variable 1 + i * t + z is x_{i,z} in copy units.
LinearProgram build_gap_lp(const Instance& inst, Kind kind);
inline LinearProgram build_gap_lp(const Instance& inst) { return build_gap_lp(inst, inst.kind()); }
FractionalAllocation gap_lp_allocation(const Instance& inst, const LpSolution& sol);

// Proportionality LP for single agents with unit copies: variable 1 + i * m + j is x_{i,j}.
LinearProgram build_prop_lp(const Instance& inst, Kind kind);
inline LinearProgram build_prop_lp(const Instance& inst) { return build_prop_lp(inst, inst.kind()); }
FractionalAllocation prop_lp_allocation(const Instance& inst, const LpSolution& sol);

struct PropLpOptions {
  // Above this many variables the dense tableau is replaced by edge generation.
  Index dense_variable_limit = 6000;
  bool force_structured = false;
};

// Solves the proportionality LP; large instances fix items with a clear winner
// under approximate agent weights and solve a small LP over the contested edges,
// growing the edge set until the prices certify optimality.
// The returned solution has the full variable layout of build_prop_lp.
LpSolution solve_prop_lp(const Instance& inst, const PropLpOptions& options = {});

struct SparseAllocation {
  FractionalAllocation allocation;
  Index positive_variables = 0;
  Index shared_type_count = 0;
  Index completed_types = 0;
};

// Reads the allocation off an optimal basic gap-LP solution, checks the
// support bound, and spreads unallocated capacity evenly over all agents.
SparseAllocation sparsify_to_vertex(const LpSolution& sol, const Instance& inst);

// min over ordered pairs of sum_z a_{i,z} (x_{i,z} - x_{j,z}), with a the
// l2-normalized values (goods) or the chores analogue with l1-normalized costs.
Real normalized_min_gap(const Instance& inst, const FractionalAllocation& alloc);

}  // namespace fairdiv
