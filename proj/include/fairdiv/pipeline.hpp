#pragma once

#include <optional>

#include "fairdiv/conditions.hpp"
#include "fairdiv/lp.hpp"
#include "fairdiv/mechanisms.hpp"
#include "fairdiv/rounding.hpp"

namespace fairdiv {

struct PipelineResult {
  IntegralAllocation allocation;
  GapReport gaps;
  std::optional<ConditionReport> condition;
  MechanismOutput mechanism;
  Real mechanism_min_gap = 0;  // normalized
  LpSolution lp;
  SparseAllocation sparse;
  RoundingTrace trace;
  Verdict envy_free;
  Verdict strongly_envy_free;
};

// Closed-form mechanism, gap LP, vertex allocation, three-phase rounding and
// exact verification. Unless forced, copy counts that break the rounding
// precondition raise a Precondition error before any work is done.
PipelineResult pipeline_allocate(const Instance& inst, bool force = false);

}  // namespace fairdiv
