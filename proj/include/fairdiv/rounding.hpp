#pragma once

#include <array>

#include "fairdiv/core.hpp"

namespace fairdiv {

/// Bookkeeping of the three-phase rounding. Masses are group totals
/// (copies per agent times group size); pool(z) is the unassigned mass of type z.
struct RoundingTrace {
  MatrixR initial_masses;
  std::array<MatrixI, 3> masses;  // after phases 1, 2, 3
  std::array<VectorI, 3> pools;
  MatrixI removed_phase2;
  MatrixI removed_phase3;
  MatrixI blocks;       // per type: how many size-n_i blocks each group received from the pool
  MatrixI extra_copies; // per agent; equals blocks
  Count pooled_mass = 0;
  Count stated_constant = 0;    // d(d-1) + t(theta + n + n_d - d - 1)
  Count adjusted_constant = 0;  // stated_constant + t
  bool conserved = true;
  bool pooled_within_bound = true;
  Real input_min_gap = 0;  // normalized min-gap of the input
};

struct EnvyRounding {
  IntegralAllocation allocation;
  RoundingTrace trace;
};

// Needs k_z >= theta and k_z divisible by g. The surplus of each type is
// handed out one group block at a time, preferring the most envious group
// (goods) or the least envious one (chores), among groups after which the
// remainder stays representable. Without enforce_copies the copy-count check
// is skipped and the call fails only if some pool cannot be handed out.
EnvyRounding round_envy(const Instance& inst, const FractionalAllocation& fractional,
                        bool enforce_copies = true);

struct ProportionalRounding {
  IntegralAllocation allocation;
  VectorQ fractional_value;  // per agent, after cleaning the input to exact rationals
  VectorQ integral_value;
  Index cycles_cancelled = 0;
};

// Single agents, one copy per item. Every agent loses at most one item's value
// (goods) or gains at most one item's cost (chores) relative to the input.
ProportionalRounding round_proportional(const Instance& inst, const FractionalAllocation& fractional);

}  // namespace fairdiv
