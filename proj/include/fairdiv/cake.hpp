#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fairdiv/conditions.hpp"
#include "fairdiv/core.hpp"

namespace fairdiv {

/// Continuous piecewise-linear density on [0, 1], rescaled at construction so
/// its total mass is exactly 1.
class PiecewiseLinearDensity {
 public:
  // (breakpoint, value) pairs; breakpoints strictly increasing from 0 to 1.
  explicit PiecewiseLinearDensity(const std::vector<std::pair<Rational, Rational>>& points);

  const std::vector<Rational>& breakpoints() const { return xs_; }
  const std::vector<Rational>& values() const { return ys_; }
  // Total mass before rescaling.
  const Rational& raw_mass() const { return raw_mass_; }

  Rational value_at(const Rational& x) const;
  Rational integral(const Rational& a, const Rational& b) const;
  // Smallest y >= x with integral(x, y) == z; exact when the root is rational,
  // otherwise within 1e-12.
  Rational cut(const Rational& x, const Rational& z) const;

  Rational max_slope() const;
  Real lipschitz() const { return to_real(max_slope()); }
  Rational l2_norm_squared() const;
  Real l2_norm() const;

 private:
  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
  Rational raw_mass_;
};

Rational inner_product(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b);
// Squared l2 distance of the densities as given, and of their l2-normalized versions.
Rational sq_distance(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b);
Real normalized_sq_distance(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b);

struct QueryMeter {
  Count eval_count = 0;
  Count cut_count = 0;
};

/// Eval and Cut queries against a fixed set of agents.
class CakeOracle {
 public:
  explicit CakeOracle(std::vector<PiecewiseLinearDensity> agents);

  Index agents() const { return static_cast<Index>(densities_.size()); }
  const PiecewiseLinearDensity& density(Index agent) const;
  Rational eval(Index agent, const Rational& a, const Rational& b);
  Rational cut(Index agent, const Rational& x, const Rational& z);
  const QueryMeter& meter() const { return meter_; }

 private:
  std::vector<PiecewiseLinearDensity> densities_;
  QueryMeter meter_;
};

struct ProtocolOptions {
  std::optional<Real> delta;   // default: measured separation
  std::optional<Count> pieces; // force the number of equal pieces
};

struct CakeOutcome {
  Count pieces = 0;
  std::vector<Index> piece_owner;
  MatrixQ piece_values;  // agent x piece, exact
  IntegralAllocation allocation;
  QueryMeter meter;
  std::optional<CakeEpsilon> epsilon;
  Real lipschitz = 0;
  Real measured_delta = 0;
  Real delta = 0;
  bool separation_ok = false;
  bool lipschitz_ok = false;
  bool preconditions_ok = false;
  ConditionReport condition;  // envy-freeness condition on the discretized instance
  Verdict strong_ef;
};

// Cuts [0, 1] into equal pieces, reads every piece value with Eval queries,
// and allocates the pieces as indivisible goods (one agent per group).
CakeOutcome run_protocol(const std::vector<PiecewiseLinearDensity>& agents,
                         const ProtocolOptions& options = {});

// Squared distance between two agents' piece-value vectors after l2 normalization.
Real discrete_sq_distance(const MatrixQ& piece_values, Index a, Index b);

}  // namespace fairdiv
