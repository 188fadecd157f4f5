#include "fairdiv/mechanisms.hpp"

#include <cmath>

namespace fairdiv {

namespace {

constexpr Real kClamp = 1e-12L;

void require_single_unit(const Instance& inst, Kind kind, const char* who) {
  if (inst.kind() != kind)
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            std::string(who) + " needs a " + to_string(kind) + " instance");
  if (!inst.single_agent_groups() || !inst.unit_copies())
    throw FairDivisionError(ErrorKind::UnsupportedScope,
                            std::string(who) + " needs single-agent groups and one copy per type");
}

// Clamp round-off negatives and rescale each column so that sum_i n_i f_iz == 1,
// then convert per-copy fractions into copy units.
FractionalAllocation finish_shares(const Instance& inst, MatrixR f) {
  for (Index i = 0; i < f.rows(); ++i)
    for (Index z = 0; z < f.cols(); ++z) {
      if (f(i, z) < -kClamp)
        throw FairDivisionError(ErrorKind::InvariantViolation, "mechanism produced a negative share");
      if (f(i, z) < 0) f(i, z) = 0;
    }
  FractionalAllocation out;
  out.shares.resize(f.rows(), f.cols());
  for (Index z = 0; z < f.cols(); ++z) {
    Real mass = 0;
    for (Index i = 0; i < f.rows(); ++i) mass += static_cast<Real>(inst.size(i)) * f(i, z);
    for (Index i = 0; i < f.rows(); ++i)
      out.shares(i, z) = static_cast<Real>(inst.copies(z)) * f(i, z) / mass;
  }
  out.complete = true;
  return out;
}

VectorR group_weights(const Instance& inst) {
  VectorR w(inst.groups());
  for (Index i = 0; i < inst.groups(); ++i) w(i) = static_cast<Real>(inst.size(i));
  return w;
}

}  // namespace

MechanismOutput relative_norm(const Instance& inst) {
  if (inst.kind() != Kind::Goods)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "relative norm is for goods");
  const MatrixR v = normalized(inst, Norm::L2);
  const VectorR k = copies_vector(inst);
  const Real n = static_cast<Real>(inst.agents());
  const Real vmax = v.maxCoeff();
  const Eigen::Matrix<Real, 1, Eigen::Dynamic> society = group_weights(inst).transpose() * v;

  MatrixR f = (v.array() / (n * vmax) + 1 / n).matrix();
  f.rowwise() -= society / (n * n * vmax);

  MechanismOutput out;
  out.allocation = finish_shares(inst, std::move(f));
  out.max_normalized = vmax;
  const Index d = inst.groups();
  out.analytic_bounds = MatrixR::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (i != j)
        out.analytic_bounds(i, j) = row_norm(inst, i, Norm::L2) *
                                    weighted_sq_distance(v.row(i), v.row(j), k.transpose()) /
                                    (2 * n * vmax);
  return out;
}

MechanismOutput log_relative_norm(const Instance& inst) {
  if (inst.kind() != Kind::Chores)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "log-relative norm is for chores");
  if (inst.items() < 2)
    throw FairDivisionError(ErrorKind::Precondition, "log-relative norm needs at least two items");
  const MatrixR c = normalized(inst, Norm::L1);
  const VectorR k = copies_vector(inst);
  const Real n = static_cast<Real>(inst.agents());
  const Real log_min = std::log(c.minCoeff());
  const MatrixR lc = c.array().log().matrix();
  const Eigen::Matrix<Real, 1, Eigen::Dynamic> society = group_weights(inst).transpose() * lc;

  MatrixR f = (lc.array() / (n * log_min) + 1 / n).matrix();
  f.rowwise() -= society / (n * n * log_min);

  MechanismOutput out;
  out.allocation = finish_shares(inst, std::move(f));
  out.max_normalized = c.maxCoeff();
  out.min_normalized = c.minCoeff();
  const Index d = inst.groups();
  out.analytic_bounds = MatrixR::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (i != j)
        out.analytic_bounds(i, j) =
            row_norm(inst, i, Norm::L1) *
            divergence(Divergence::KL, c.row(i).transpose(), c.row(j).transpose(), k) /
            (-n * log_min);
  return out;
}

VectorR society_valuation(const Instance& inst) {
  const MatrixR v = normalized(inst, Norm::L1);
  return v.colwise().mean().transpose();
}

MechanismOutput trading_post(const Instance& inst) {
  require_single_unit(inst, Kind::Goods, "trading post");
  const MatrixR v = normalized(inst, Norm::L1);
  const VectorR col = v.colwise().sum().transpose();
  for (Index j = 0; j < col.size(); ++j)
    if (col(j) <= 0)
      throw FairDivisionError(ErrorKind::UndefinedShare,
                              "item " + std::to_string(j) + " has no value to anyone");
  MechanismOutput out;
  out.allocation.shares = v.array().rowwise() / col.transpose().array();
  out.allocation.complete = true;
  out.max_normalized = v.maxCoeff();
  const Real n = static_cast<Real>(inst.agents());
  const VectorR s = col / n;
  out.analytic_bounds = MatrixR::Zero(inst.groups(), inst.groups());
  for (Index i = 0; i < inst.groups(); ++i)
    out.analytic_bounds(i, i) = (1 + divergence(Divergence::Chi2, v.row(i).transpose(), s)) / n;
  return out;
}

VectorR harmonic_costs(const Instance& inst) {
  const MatrixR c = normalized(inst, Norm::L1);
  const Real n = static_cast<Real>(inst.groups());
  return (n / c.array().inverse().colwise().sum()).transpose();
}

Real harmonic_penalty(const Instance& inst, Index agent) {
  const VectorR c = normalize(inst, agent, Norm::L1);
  const VectorR h = harmonic_costs(inst);
  return ((c - h).array().square() / c.array()).sum();
}

MechanismOutput inverse_trading_post(const Instance& inst) {
  require_single_unit(inst, Kind::Chores, "inverse trading post");
  const MatrixR c = normalized(inst, Norm::L1);
  const MatrixR inv = c.array().inverse().matrix();
  const VectorR col = inv.colwise().sum().transpose();
  MechanismOutput out;
  out.allocation.shares = inv.array().rowwise() / col.transpose().array();
  out.allocation.complete = true;
  out.max_normalized = c.maxCoeff();
  out.min_normalized = c.minCoeff();
  const Real n = static_cast<Real>(inst.agents());
  const VectorR h = (static_cast<Real>(inst.groups()) / col.array()).matrix();
  Real penalty = 0;
  for (Index l = 0; l < inst.groups(); ++l)
    penalty += ((c.row(l).transpose() - h).array().square() / c.row(l).transpose().array()).sum();
  out.analytic_bounds = MatrixR::Zero(inst.groups(), inst.groups());
  for (Index i = 0; i < inst.groups(); ++i) out.analytic_bounds(i, i) = (1 - penalty / n) / n;
  return out;
}

}  // namespace fairdiv
