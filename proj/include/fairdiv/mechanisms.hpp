#pragma once

#include "fairdiv/core.hpp"

namespace fairdiv {

struct MechanismOutput {
  FractionalAllocation allocation;
  // Relative norms: per-pair gap bound (goods) or exact gap value (chores).
  // Trading posts: normalized utility or cost identity on the diagonal.
  MatrixR analytic_bounds;
  Real max_normalized = 0;  // largest normalized value or cost
  Real min_normalized = 0;  // smallest normalized cost (chores only)
};

MechanismOutput relative_norm(const Instance& inst);
MechanismOutput log_relative_norm(const Instance& inst);
MechanismOutput trading_post(const Instance& inst);
MechanismOutput inverse_trading_post(const Instance& inst);

// Column means of the l1-normalized values (goods, unit copies).
VectorR society_valuation(const Instance& inst);
// Per-item harmonic mean of l1-normalized costs.
VectorR harmonic_costs(const Instance& inst);
// sum_j (c_ij - H_j)^2 / c_ij for one agent.
Real harmonic_penalty(const Instance& inst, Index agent);

}  // namespace fairdiv
