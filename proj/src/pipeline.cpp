#include "fairdiv/pipeline.hpp"

namespace fairdiv {

PipelineResult pipeline_allocate(const Instance& inst, bool force) {
  PipelineResult out;
  const Thresholds th = thresholds(inst.group_sizes());
  bool copies_ok = true;
  for (Count k : inst.type_copies()) copies_ok = copies_ok && k >= th.theta && k % th.g == 0;
  if (!copies_ok && !force)
    throw FairDivisionError(ErrorKind::Precondition,
                            "every type needs a multiple of " + std::to_string(th.g) +
                                " copies, at least " + std::to_string(th.theta));

  const bool goods = inst.kind() == Kind::Goods;
  if (goods || inst.items() >= 2) out.condition = ef_condition(inst);
  if (goods) {
    out.mechanism = relative_norm(inst);
  } else if (inst.types() >= 2) {
    out.mechanism = log_relative_norm(inst);
  }
  if (out.mechanism.allocation.shares.size() > 0 && inst.groups() >= 2)
    out.mechanism_min_gap = normalized_min_gap(inst, out.mechanism.allocation);

  out.lp = solve(build_gap_lp(inst));
  if (out.lp.status != LpStatus::Optimal)
    throw FairDivisionError(ErrorKind::InvariantViolation,
                            std::string("gap LP ended ") + to_string(out.lp.status));
  out.sparse = sparsify_to_vertex(out.lp, inst);
  EnvyRounding rounded = round_envy(inst, out.sparse.allocation, copies_ok);
  out.allocation = std::move(rounded.allocation);
  out.trace = std::move(rounded.trace);
  out.gaps = gap_report(inst, out.allocation);
  out.envy_free = verify(inst, out.allocation, Notion::EF);
  out.strongly_envy_free = verify(inst, out.allocation, Notion::StrongEF);
  return out;
}

}  // namespace fairdiv
