#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "fairdiv/conditions.hpp"
#include "fairdiv/experiment.hpp"
#include "fairdiv/lp.hpp"
#include "fairdiv/mechanisms.hpp"
#include "fairdiv/rounding.hpp"

namespace fairdiv {

const char* to_string(Target target) {
  switch (target) {
    case Target::PropCondition: return "PROP_CONDITION";
    case Target::PropAllocation: return "PROP_ALLOCATION";
    case Target::Chi2Bound: return "CHI2_BOUND";
    case Target::ChoresPenaltyBound: return "CHORES_PENALTY_BOUND";
  }
  return "?";
}

Target parse_target(std::string_view name) {
  for (Target t : {Target::PropCondition, Target::PropAllocation, Target::Chi2Bound,
                   Target::ChoresPenaltyBound})
    if (name == to_string(t)) return t;
  throw FairDivisionError(ErrorKind::InvalidInput, "unknown experiment target '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& config) {
  if (config.trials < 1) throw FairDivisionError(ErrorKind::InvalidInput, "trials must be at least 1");
  if (config.n < 2) throw FairDivisionError(ErrorKind::InvalidInput, "n must be at least 2");
  if (config.m < 1) throw FairDivisionError(ErrorKind::InvalidInput, "m must be at least 1");
  if (config.target == Target::Chi2Bound && config.kind != Kind::Goods)
    throw FairDivisionError(ErrorKind::InvalidInput, "CHI2_BOUND is a goods experiment");
  if (config.target == Target::ChoresPenaltyBound && config.kind != Kind::Chores)
    throw FairDivisionError(ErrorKind::InvalidInput, "CHORES_PENALTY_BOUND is a chores experiment");
}

std::uint64_t trial_seed(std::uint64_t seed, Count trial) {
  std::uint64_t z = seed + static_cast<std::uint64_t>(trial) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Instance sample_instance(Count n, Count m, Kind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Integer scale = Integer(1) << 53;
  MatrixQ values(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) {
      const std::uint64_t u = rng() >> 11;
      values(i, j) = Rational(Integer(kind == Kind::Goods ? u : u + 1), scale);
    }
  return Instance(std::vector<Count>(static_cast<size_t>(n), 1),
                  std::vector<Count>(static_cast<size_t>(m), 1), std::move(values), kind);
}

namespace {

VectorR penalties(const MatrixR& c) {
  const Real n = static_cast<Real>(c.rows());
  const VectorR h = (n / c.array().inverse().colwise().sum()).transpose();
  VectorR out(c.rows());
  for (Index i = 0; i < c.rows(); ++i)
    out(i) = ((c.row(i).transpose() - h).array().square() / c.row(i).transpose().array()).sum();
  return out;
}

}  // namespace

Real min_chi2_to_society(const Instance& inst) {
  const MatrixR v = normalized(inst, Norm::L1);
  const VectorR s = v.colwise().mean().transpose();
  Real best = std::numeric_limits<Real>::infinity();
  for (Index i = 0; i < v.rows(); ++i)
    best = std::min(best, divergence(Divergence::Chi2, v.row(i).transpose(), s));
  return best;
}

Real min_harmonic_penalty(const Instance& inst) {
  return penalties(normalized(inst, Norm::L1)).minCoeff();
}

Real variational_penalty_bound(const Instance& inst, Index agent) {
  const MatrixR c = normalized(inst, Norm::L1);
  const Real n = static_cast<Real>(c.rows());
  const VectorR h = (n / c.array().inverse().colwise().sum()).transpose();
  const VectorR ci = c.row(agent).transpose();
  // <H - c, g> - <c, g^2> / 4 with g = -1/2 everywhere.
  return -0.5L * (h - ci).sum() - ci.sum() / 16;
}

TrialOutcome run_trial(const ExperimentConfig& config, Count index) {
  TrialOutcome out;
  out.index = index;
  out.seed = trial_seed(config.seed, index);
  const Instance inst = sample_instance(config.n, config.m, config.kind, out.seed);
  const Real n = static_cast<Real>(config.n);
  switch (config.target) {
    case Target::Chi2Bound:
      out.quantity = min_chi2_to_society(inst);
      out.reference = (n - 3) / (3 * n);
      out.success = out.quantity >= out.reference;
      break;
    case Target::ChoresPenaltyBound:
      out.quantity = min_harmonic_penalty(inst);
      out.reference = 5.0L / 16;
      out.success = out.quantity >= out.reference;
      break;
    case Target::PropCondition: {
      const ConditionReport r = prop_condition(inst);
      out.quantity = r.lhs;
      out.reference = r.threshold;
      out.success = r.satisfied;
      break;
    }
    case Target::PropAllocation: {
      const bool goods = config.kind == Kind::Goods;
      // The closed-form mechanism is a feasible point of the LP; the LP can only do better.
      const MechanismOutput mech = goods ? trading_post(inst) : inverse_trading_post(inst);
      const LpSolution sol = solve_prop_lp(inst);
      if (sol.status != LpStatus::Optimal)
        throw FairDivisionError(ErrorKind::InvariantViolation, "proportionality LP is not optimal");
      const Real mech_value = goods ? mech.analytic_bounds.diagonal().minCoeff()
                                    : mech.analytic_bounds.diagonal().maxCoeff();
      if (goods ? sol.objective_value < mech_value - 1e-9L : sol.objective_value > mech_value + 1e-9L)
        throw FairDivisionError(ErrorKind::InvariantViolation, "LP optimum is worse than the mechanism");
      const ProportionalRounding rounded = round_proportional(inst, prop_lp_allocation(inst, sol));
      const Verdict v = verify(inst, rounded.allocation, Notion::Prop);
      // Worst ratio of n * own bundle to the full bundle.
      Real worst = goods ? std::numeric_limits<Real>::infinity() : 0;
      for (Index i = 0; i < inst.groups(); ++i) {
        const Real ratio = n * to_real(rounded.integral_value(i)) / to_real(row_norm_l1(inst, i));
        worst = goods ? std::min(worst, ratio) : std::max(worst, ratio);
      }
      out.quantity = worst;
      out.reference = 1;
      out.success = v.holds;
      break;
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentReport report;
  report.config = config;
  report.trials.resize(static_cast<size_t>(config.trials));
  switch (config.target) {
    case Target::Chi2Bound: report.quantity_name = "min_chi2"; break;
    case Target::ChoresPenaltyBound: report.quantity_name = "min_penalty"; break;
    case Target::PropCondition: report.quantity_name = "max_normalized_value"; break;
    case Target::PropAllocation:
      report.quantity_name = config.kind == Kind::Goods ? "min_share_ratio" : "max_share_ratio";
      break;
  }

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<Count>(workers, config.trials));
  std::atomic<Count> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (Count i; (i = next++) < config.trials;) {
      try {
        report.trials[static_cast<size_t>(i)] = run_trial(config, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Real> q;
  for (const auto& t : report.trials) {
    report.successes += t.success ? 1 : 0;
    q.push_back(t.quantity);
  }
  report.success_fraction = Rational(report.successes, config.trials);
  std::sort(q.begin(), q.end());
  report.min_quantity = q.front();
  const size_t mid = q.size() / 2;
  report.median_quantity = q.size() % 2 ? q[mid] : (q[mid - 1] + q[mid]) / 2;
  return report;
}

}  // namespace fairdiv
