#include <algorithm>
#include <cmath>
#include <limits>

#include "fairdiv/conditions.hpp"
#include "fairdiv/mechanisms.hpp"

namespace fairdiv {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

Instance unit_copies_of(const Instance& inst) {
  return inst.with_copies(std::vector<Count>(static_cast<size_t>(inst.types()), 1));
}

ConditionReport echo(const Instance& inst, std::string condition) {
  ConditionReport r;
  r.condition = std::move(condition);
  const Thresholds th = thresholds(inst.group_sizes());
  r.n = inst.agents();
  r.d = inst.groups();
  r.t = inst.types();
  r.g = th.g;
  r.theta = th.theta;
  for (Index z = 0; z < inst.types(); ++z)
    r.copies_ok = r.copies_ok && inst.copies(z) >= th.theta && inst.copies(z) % th.g == 0;
  return r;
}

void settle(ConditionReport& r) {
  if (r.direction == Direction::AtMost) {
    r.satisfied = r.lhs <= r.threshold;
    r.strict = r.lhs < r.threshold;
    r.margin = r.threshold - r.lhs;
  } else {
    r.satisfied = r.lhs >= r.threshold;
    r.strict = r.lhs > r.threshold;
    r.margin = r.lhs - r.threshold;
  }
}

void vacuous(ConditionReport& r) {
  r.vacuous = true;
  r.threshold = kInf;
  r.satisfied = true;
  r.strict = true;
  r.margin = kInf;
}

void require(const Instance& inst, Kind kind) {
  if (inst.kind() != kind)
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            std::string("condition applies to ") + to_string(kind) + " instances");
}

void require_single_unit(const Instance& inst) {
  if (!inst.single_agent_groups() || !inst.unit_copies())
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            "condition needs single-agent groups and one copy per item");
}

Real min_cost_share(const MatrixR& c) { return c.minCoeff(); }

}  // namespace

Real rounding_loss_constant(const Instance& inst) {
  const Thresholds th = thresholds(inst.group_sizes());
  const Real d = static_cast<Real>(inst.groups()), t = static_cast<Real>(inst.types());
  const Real n = static_cast<Real>(inst.agents());
  const Real nd = static_cast<Real>(inst.size(inst.groups() - 1));
  return d * (d - 1) + t * (static_cast<Real>(th.theta) + n + nd - d - 1);
}

Count round_up_copies(Real raw, Count g, Count theta) {
  if (!std::isfinite(raw)) throw FairDivisionError(ErrorKind::Unbounded, "copy bound is infinite");
  auto k = static_cast<Count>(std::ceil(raw - 1e-12L * std::max<Real>(1, std::fabs(raw))));
  k = std::max({k, theta, Count{1}});
  if (k % g != 0) k += g - k % g;
  return k;
}

Real min_sq_distance(const Instance& inst) {
  const MatrixR a = normalized(inst, Norm::L2);
  const VectorR k = copies_vector(inst);
  Real best = kInf;
  for (Index i = 0; i < inst.groups(); ++i)
    for (Index j = 0; j < inst.groups(); ++j)
      if (i != j)
        best = std::min(best, weighted_sq_distance(a.row(i).transpose(), a.row(j).transpose(), k));
  return best;
}

Real min_kl(const Instance& inst) {
  const MatrixR c = normalized(inst, Norm::L1);
  const VectorR k = copies_vector(inst);
  Real best = kInf;
  for (Index i = 0; i < inst.groups(); ++i)
    for (Index j = 0; j < inst.groups(); ++j)
      if (i != j)
        best = std::min(best, divergence(Divergence::KL, c.row(i).transpose(), c.row(j).transpose(), k));
  return best;
}

ConditionReport ef_condition_goods(const Instance& inst) {
  require(inst, Kind::Goods);
  ConditionReport r = echo(inst, "ef-goods");
  r.lambda = rounding_loss_constant(inst);
  r.lhs = normalized(inst, Norm::L2).maxCoeff();
  if (inst.groups() < 2) {
    vacuous(r);
    return r;
  }
  r.separation = min_sq_distance(inst);
  r.threshold = std::sqrt(r.separation / (2 * static_cast<Real>(r.n) * r.lambda));
  settle(r);
  return r;
}

ConditionReport mu_bound_goods(const Instance& inst) {
  require(inst, Kind::Goods);
  ConditionReport r = echo(inst, "mu-goods");
  const Instance unit = unit_copies_of(inst);
  const Real d = static_cast<Real>(r.d), t = static_cast<Real>(r.t), n = static_cast<Real>(r.n);
  const Real nd = static_cast<Real>(inst.size(inst.groups() - 1));
  r.lambda = d * d + t * (static_cast<Real>(r.theta) + n + nd - d - 1);
  if (inst.groups() < 2) {
    vacuous(r);
    r.mu_bound = round_up_copies(0, r.g, r.theta);
    return r;
  }
  r.separation = min_sq_distance(unit);
  if (r.separation <= 0) {
    r.unbounded = true;
    r.mu_raw = kInf;
    r.lhs = 0;
    r.threshold = kInf;
    r.direction = Direction::AtLeast;
    settle(r);
    return r;
  }
  r.mu_raw = 2 * n * r.lambda / r.separation;
  r.mu_bound = round_up_copies(r.mu_raw, r.g, r.theta);
  // Compare the smallest copy count against the bound.
  r.direction = Direction::AtLeast;
  r.lhs = static_cast<Real>(*std::min_element(inst.type_copies().begin(), inst.type_copies().end()));
  r.threshold = r.mu_raw;
  settle(r);
  r.satisfied = r.satisfied && r.copies_ok;
  return r;
}

ConditionReport ef_condition_chores(const Instance& inst) {
  require(inst, Kind::Chores);
  if (inst.items() < 2)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "chores condition needs at least two items");
  ConditionReport r = echo(inst, "ef-chores");
  const MatrixR c = normalized(inst, Norm::L1);
  r.lhs = c.maxCoeff();
  r.lambda = 2 * static_cast<Real>(r.n) * rounding_loss_constant(inst);
  if (inst.groups() < 2) {
    vacuous(r);
    return r;
  }
  r.separation = min_kl(inst);
  r.threshold = r.separation / (r.lambda * std::log(1 / min_cost_share(c)));
  settle(r);
  return r;
}

ConditionReport mu_bound_chores(const Instance& inst) {
  require(inst, Kind::Chores);
  if (inst.types() < 2)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "chores bound needs at least two types");
  ConditionReport r = echo(inst, "mu-chores");
  const Instance unit = unit_copies_of(inst);
  const Real n = static_cast<Real>(r.n);
  r.lambda = 2 * n * rounding_loss_constant(inst);
  if (inst.groups() < 2) {
    vacuous(r);
    r.mu_bound = round_up_copies(0, r.g, r.theta);
    return r;
  }
  r.separation = min_kl(unit);
  r.direction = Direction::AtLeast;
  r.lhs = static_cast<Real>(*std::min_element(inst.type_copies().begin(), inst.type_copies().end()));
  if (r.separation <= 0) {
    r.unbounded = true;
    r.mu_raw = kInf;
    r.threshold = kInf;
    settle(r);
    return r;
  }
  const Real log_inv_min = std::log(1 / min_cost_share(normalized(unit, Norm::L1)));
  const Real log_ratio = std::log(2 * r.lambda / r.separation);
  r.log_term_negative = log_ratio < 0;
  r.mu_raw = 2 * (n + (2.5L * n + r.lambda - 1) * log_inv_min + r.lambda * (log_ratio - 1)) / r.separation;
  r.mu_bound = round_up_copies(r.mu_raw, r.g, r.theta);
  r.threshold = r.mu_raw;
  settle(r);
  r.satisfied = r.satisfied && r.copies_ok;
  return r;
}

ConditionReport prop_condition(const Instance& inst, Kind kind) {
  require(inst, kind);
  require_single_unit(inst);
  const Real n = static_cast<Real>(inst.agents());
  const MatrixR a = normalized(inst, Norm::L1);
  if (kind == Kind::Goods) {
    ConditionReport r = echo(inst, "prop-goods");
    const VectorR s = society_valuation(inst);
    Real best = kInf;
    for (Index i = 0; i < inst.groups(); ++i)
      best = std::min(best, divergence(Divergence::Chi2, a.row(i).transpose(), s));
    r.separation = best;
    r.lhs = a.maxCoeff();
    r.threshold = best / n;
    settle(r);
    return r;
  }
  ConditionReport r = echo(inst, "prop-chores");
  Real total = 0;
  for (Index i = 0; i < inst.groups(); ++i) total += harmonic_penalty(inst, i);
  r.separation = total;
  r.lhs = a.maxCoeff();
  r.threshold = total / (n * n);
  settle(r);
  return r;
}

ConditionReport tefx_condition(const Instance& inst) {
  require(inst, Kind::Goods);
  require_single_unit(inst);
  ConditionReport r = echo(inst, "tefx-goods");
  const MatrixR a = normalized(inst, Norm::L1);
  Real worst = 0;
  for (Index i = 0; i < inst.groups(); ++i)
    for (Index j = i + 1; j < inst.groups(); ++j)
      worst = std::max(worst, divergence(Divergence::TV, a.row(i).transpose(), a.row(j).transpose()));
  r.separation = worst;
  r.direction = Direction::AtLeast;
  r.lhs = a.minCoeff();
  r.threshold = 8 * worst;
  settle(r);
  return r;
}

ConditionReport ef_condition(const Instance& inst) {
  return inst.kind() == Kind::Goods ? ef_condition_goods(inst) : ef_condition_chores(inst);
}

ConditionReport mu_bound(const Instance& inst) {
  return inst.kind() == Kind::Goods ? mu_bound_goods(inst) : mu_bound_chores(inst);
}

CakeEpsilon cake_epsilon(Count n, Real lipschitz, Real delta) {
  if (n < 2) throw FairDivisionError(ErrorKind::InvalidInput, "cake protocol needs at least two agents");
  if (!(lipschitz > 0) || !(delta > 0) || !std::isfinite(lipschitz) || !std::isfinite(delta))
    throw FairDivisionError(ErrorKind::InvalidInput, "Lipschitz constant and separation must be positive");
  CakeEpsilon out;
  const Real k = lipschitz;
  const Real n3 = static_cast<Real>(n) * static_cast<Real>(n) * static_cast<Real>(n);
  out.bound_m = std::max<Real>(std::cbrt(8 * k), 2);
  const Real m2 = out.bound_m * out.bound_m;
  const Real second = (std::sqrt(3.5L * k * 3.5L * k + 16 * n3 * m2 * delta) - 3.5L * k) / (4 * n3 * m2);
  out.epsilon_raw = std::min(1 / k, second);
  const Real inv = 1 / out.epsilon_raw;
  const Real near = std::round(inv);
  out.pieces = static_cast<Count>(std::fabs(inv - near) <= 1e-9L * near ? near : std::ceil(inv));
  out.pieces = std::max<Count>(out.pieces, 1);
  out.epsilon = 1 / static_cast<Real>(out.pieces);
  out.query_budget = n * out.pieces;
  return out;
}

Real goods_lemma_slack(Real x, Real a, Real b) {
  const Real s = x + a > 0 ? std::sqrt(x / (x + a)) : 1;
  const Real inner = s * b - (1 - s);
  return x * inner * inner - (b * b * x - a * (b + 1));
}

Real chores_lemma_slack(Real x, Real a, Real b, Real c) {
  auto xlog = [](Real w, Real arg) { return w == 0 ? Real(0) : w * std::log(arg); };
  const Real ratio = x + a > 0 ? x / (x + a) : 1;
  const Real lhs = x * (ratio * b) - (x == 0 ? Real(0) : xlog(x, (x + a) / x)) - xlog(c, x + a);
  const Real rhs = b / 2 * x - (a * (1.5L * b + 1) + (c == 0 ? Real(0) : c * (std::log(2 * c / b) - 1)));
  return lhs - rhs;
}

Real copies_lemma_goods_slack(const Instance& inst, Count alpha, Count beta) {
  require(inst, Kind::Goods);
  for (Count k : inst.type_copies())
    if (k < alpha || k > beta)
      throw FairDivisionError(ErrorKind::Precondition, "copies outside [alpha, beta]");
  const Instance unit = unit_copies_of(inst);
  const MatrixR ak = normalized(inst, Norm::L2), a1 = normalized(unit, Norm::L2);
  const VectorR k = copies_vector(inst), ones = VectorR::Ones(inst.types());
  const Real r = std::sqrt(static_cast<Real>(alpha) / static_cast<Real>(beta));
  Real worst = kInf;
  for (Index i = 0; i < inst.groups(); ++i)
    for (Index j = 0; j < inst.groups(); ++j) {
      if (i == j) continue;
      const Real dk = std::sqrt(weighted_sq_distance(ak.row(i).transpose(), ak.row(j).transpose(), k));
      const Real d1 = std::sqrt(weighted_sq_distance(a1.row(i).transpose(), a1.row(j).transpose(), ones));
      worst = std::min(worst, dk - (r * d1 - (1 - r)));
    }
  return worst;
}

Real copies_lemma_chores_slack(const Instance& inst, Count alpha, Count beta) {
  require(inst, Kind::Chores);
  for (Count k : inst.type_copies())
    if (k < alpha || k > beta)
      throw FairDivisionError(ErrorKind::Precondition, "copies outside [alpha, beta]");
  const Instance unit = unit_copies_of(inst);
  const MatrixR ck = normalized(inst, Norm::L1), c1 = normalized(unit, Norm::L1);
  const VectorR k = copies_vector(inst);
  const Real al = static_cast<Real>(alpha), be = static_cast<Real>(beta);
  const Real penalty = std::log(be / al) + (be - al) / al * std::log(1 / c1.minCoeff());
  Real worst = kInf;
  for (Index i = 0; i < inst.groups(); ++i)
    for (Index j = 0; j < inst.groups(); ++j) {
      if (i == j) continue;
      const Real kl_k = divergence(Divergence::KL, ck.row(i).transpose(), ck.row(j).transpose(), k);
      const Real kl_1 = divergence(Divergence::KL, c1.row(i).transpose(), c1.row(j).transpose());
      worst = std::min(worst, kl_k - (al / be * kl_1 - penalty));
    }
  return worst;
}

}  // namespace fairdiv
