#pragma once

#include <optional>
#include <string>

#include "fairdiv/core.hpp"

namespace fairdiv {

enum class Direction { AtMost, AtLeast };  // satisfied iff lhs <= threshold, or lhs >= threshold

struct ConditionReport {
  std::string condition;
  Real lhs = 0;
  Real threshold = 0;
  Direction direction = Direction::AtMost;
  bool satisfied = false;
  bool strict = false;  // the inequality holds strictly
  Real margin = 0;      // threshold - lhs (AtMost) or lhs - threshold (AtLeast)
  bool vacuous = false;

  std::optional<Count> mu_bound;
  Real mu_raw = 0;
  bool unbounded = false;
  bool log_term_negative = false;

  // Inputs echo.
  Count n = 0;
  Index d = 0;
  Index t = 0;
  Count g = 1;
  Count theta = 0;
  Real separation = 0;  // min squared distance, divergence, or penalty as applicable
  Real lambda = 0;
  bool copies_ok = true;  // k_z >= theta and k_z divisible by g for every type
};

ConditionReport ef_condition_goods(const Instance& inst);
ConditionReport mu_bound_goods(const Instance& inst);
ConditionReport ef_condition_chores(const Instance& inst);
ConditionReport mu_bound_chores(const Instance& inst);
ConditionReport prop_condition(const Instance& inst, Kind kind);
inline ConditionReport prop_condition(const Instance& inst) { return prop_condition(inst, inst.kind()); }
ConditionReport tefx_condition(const Instance& inst);

// Dispatch on the instance kind.
ConditionReport ef_condition(const Instance& inst);
ConditionReport mu_bound(const Instance& inst);

// d(d-1) + t(theta + n + n_d - d - 1)
Real rounding_loss_constant(const Instance& inst);
// Smallest multiple of g that is >= max(theta, ceil(raw)).
Count round_up_copies(Real raw, Count g, Count theta);

// Min over ordered pairs of the squared distance between l2-normalized rows.
Real min_sq_distance(const Instance& inst);
// Min over ordered pairs of KL between l1-normalized cost rows.
Real min_kl(const Instance& inst);

struct CakeEpsilon {
  Real bound_m = 0;      // max((8k)^(1/3), 2)
  Real epsilon_raw = 0;  // before forcing an integral piece count
  Real epsilon = 0;      // 1 / pieces
  Count pieces = 0;
  Count query_budget = 0;  // n * pieces
};
CakeEpsilon cake_epsilon(Count n, Real lipschitz, Real delta);

// Technical inequalities: each returns lhs - rhs.
Real goods_lemma_slack(Real x, Real a, Real b);
Real chores_lemma_slack(Real x, Real a, Real b, Real c);
// Copy-count perturbation bounds for k_z in [alpha, beta]; min over ordered pairs of lhs - rhs.
Real copies_lemma_goods_slack(const Instance& inst, Count alpha, Count beta);
Real copies_lemma_chores_slack(const Instance& inst, Count alpha, Count beta);

}  // namespace fairdiv
