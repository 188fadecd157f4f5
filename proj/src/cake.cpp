#include <algorithm>
#include <cmath>

#include "fairdiv/cake.hpp"
#include "fairdiv/lp.hpp"
#include "fairdiv/rounding.hpp"

namespace fairdiv {

namespace {

size_t u(Index i) { return static_cast<size_t>(i); }

Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  const Integer rn = boost::multiprecision::sqrt(num);
  const Integer rd = boost::multiprecision::sqrt(den);
  if (rn * rn != num || rd * rd != den) return std::nullopt;
  return Rational(rn, rd);
}

void check_unit(const Rational& x, const char* what) {
  if (x < 0 || x > 1) throw FairDivisionError(ErrorKind::InvalidInput, std::string(what) + " must lie in [0, 1]");
}

// Merged breakpoints of two densities.
std::vector<Rational> merged(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b) {
  std::vector<Rational> xs = a.breakpoints();
  xs.insert(xs.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

PiecewiseLinearDensity::PiecewiseLinearDensity(
    const std::vector<std::pair<Rational, Rational>>& points) {
  if (points.size() < 2)
    throw FairDivisionError(ErrorKind::InvalidInput, "a density needs at least two breakpoints");
  if (points.front().first != 0 || points.back().first != 1)
    throw FairDivisionError(ErrorKind::InvalidInput, "breakpoints must start at 0 and end at 1");
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].second < 0)
      throw FairDivisionError(ErrorKind::InvalidInput, "density values must be nonnegative");
    if (i > 0 && points[i].first <= points[i - 1].first)
      throw FairDivisionError(ErrorKind::InvalidInput, "breakpoints must be strictly increasing");
    xs_.push_back(points[i].first);
    ys_.push_back(points[i].second);
  }
  raw_mass_ = 0;
  for (size_t i = 1; i < xs_.size(); ++i) raw_mass_ += (xs_[i] - xs_[i - 1]) * (ys_[i] + ys_[i - 1]) / 2;
  if (raw_mass_ <= 0) throw FairDivisionError(ErrorKind::DegenerateAgent, "density has zero mass");
  for (auto& y : ys_) y /= raw_mass_;
}

Rational PiecewiseLinearDensity::value_at(const Rational& x) const {
  check_unit(x, "point");
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  if (it == xs_.end()) return ys_.back();
  const size_t hi = static_cast<size_t>(it - xs_.begin());
  const size_t lo = hi - 1;
  return ys_[lo] + (ys_[hi] - ys_[lo]) * (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
}

Rational PiecewiseLinearDensity::integral(const Rational& a, const Rational& b) const {
  check_unit(a, "interval end");
  check_unit(b, "interval end");
  if (a > b) throw FairDivisionError(ErrorKind::InvalidInput, "interval is reversed");
  Rational total = 0;
  for (size_t i = 1; i < xs_.size(); ++i) {
    const Rational lo = std::max(a, xs_[i - 1]);
    const Rational hi = std::min(b, xs_[i]);
    if (lo >= hi) continue;
    total += (hi - lo) * (value_at(lo) + value_at(hi)) / 2;
  }
  return total;
}

Rational PiecewiseLinearDensity::cut(const Rational& x, const Rational& z) const {
  check_unit(x, "cut start");
  if (z < 0) throw FairDivisionError(ErrorKind::InvalidInput, "cut value must be nonnegative");
  if (z == 0) return x;
  if (z > integral(x, 1))
    throw FairDivisionError(ErrorKind::InsufficientMass, "not enough mass to the right of the cut start");
  Rational rest = z;
  Rational pos = x;
  for (size_t i = 1; i < xs_.size(); ++i) {
    if (xs_[i] <= pos) continue;
    const Rational s0 = value_at(pos);
    const Rational slope = (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
    const Rational mass = (xs_[i] - pos) * (s0 + ys_[i]) / 2;
    if (mass < rest) {
      rest -= mass;
      pos = xs_[i];
      continue;
    }
    // s0 h + slope h^2 / 2 = rest, solved in the cancellation-free form.
    const Rational disc = s0 * s0 + 2 * slope * rest;
    Rational h;
    if (auto root = exact_sqrt(disc)) {
      h = 2 * rest / (s0 + *root);
    } else {
      const Real root_r = std::sqrt(std::max<Real>(0, to_real(disc)));
      h = to_rational(2 * to_real(rest) / (to_real(s0) + root_r));
    }
    Rational y = pos + h;
    if (y > xs_[i]) y = xs_[i];
    if (y < pos) y = pos;
    return y;
  }
  return 1;
}

Rational PiecewiseLinearDensity::max_slope() const {
  Rational best = 0;
  for (size_t i = 1; i < xs_.size(); ++i)
    best = std::max(best, abs_q((ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1])));
  return best;
}

Rational PiecewiseLinearDensity::l2_norm_squared() const { return inner_product(*this, *this); }

Real PiecewiseLinearDensity::l2_norm() const { return std::sqrt(to_real(l2_norm_squared())); }

Rational inner_product(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b) {
  const std::vector<Rational> xs = merged(a, b);
  Rational total = 0;
  for (size_t i = 1; i < xs.size(); ++i) {
    const Rational fa = a.value_at(xs[i - 1]), fb = a.value_at(xs[i]);
    const Rational ga = b.value_at(xs[i - 1]), gb = b.value_at(xs[i]);
    total += (xs[i] - xs[i - 1]) * (2 * fa * ga + fa * gb + fb * ga + 2 * fb * gb) / 6;
  }
  return total;
}

Rational sq_distance(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b) {
  return a.l2_norm_squared() + b.l2_norm_squared() - 2 * inner_product(a, b);
}

Real normalized_sq_distance(const PiecewiseLinearDensity& a, const PiecewiseLinearDensity& b) {
  const Real cosine = to_real(inner_product(a, b)) / (a.l2_norm() * b.l2_norm());
  return std::max<Real>(0, 2 - 2 * cosine);
}

CakeOracle::CakeOracle(std::vector<PiecewiseLinearDensity> agents) : densities_(std::move(agents)) {}

const PiecewiseLinearDensity& CakeOracle::density(Index agent) const {
  if (agent < 0 || agent >= agents())
    throw FairDivisionError(ErrorKind::DimensionMismatch, "agent index out of range");
  return densities_[u(agent)];
}

Rational CakeOracle::eval(Index agent, const Rational& a, const Rational& b) {
  Rational v = density(agent).integral(a, b);
  ++meter_.eval_count;
  return v;
}

Rational CakeOracle::cut(Index agent, const Rational& x, const Rational& z) {
  Rational y = density(agent).cut(x, z);
  ++meter_.cut_count;
  return y;
}

Real discrete_sq_distance(const MatrixQ& piece_values, Index a, Index b) {
  const VectorR pa = to_real(piece_values.row(a).transpose());
  const VectorR pb = to_real(piece_values.row(b).transpose());
  return (pa / pa.norm() - pb / pb.norm()).squaredNorm();
}

CakeOutcome run_protocol(const std::vector<PiecewiseLinearDensity>& agents, const ProtocolOptions& options) {
  const auto n = static_cast<Index>(agents.size());
  if (n < 2) throw FairDivisionError(ErrorKind::InvalidInput, "cake protocol needs at least two agents");
  CakeOutcome out;

  out.lipschitz = 0;
  out.lipschitz_ok = true;
  for (const auto& a : agents) {
    out.lipschitz = std::max(out.lipschitz, a.lipschitz());
  }
  // Each l2-normalized density has slope at most the common constant.
  for (const auto& a : agents)
    out.lipschitz_ok = out.lipschitz_ok && a.lipschitz() / a.l2_norm() <= out.lipschitz + 1e-15L;

  Real measured = std::numeric_limits<Real>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      measured = std::min({measured, to_real(sq_distance(agents[u(i)], agents[u(j)])),
                           normalized_sq_distance(agents[u(i)], agents[u(j)])});
  out.measured_delta = measured;
  out.delta = options.delta.value_or(measured);
  out.separation_ok = out.delta > 0 && measured >= out.delta;
  out.preconditions_ok = out.separation_ok && out.lipschitz_ok;

  if (options.pieces) {
    if (*options.pieces < 1) throw FairDivisionError(ErrorKind::InvalidInput, "piece count must be positive");
    out.pieces = *options.pieces;
  } else if (out.delta > 0) {
    out.epsilon = cake_epsilon(n, std::max<Real>(out.lipschitz, 1e-12L), out.delta);
    out.pieces = out.epsilon->pieces;
  } else {
    out.pieces = n;
  }

  CakeOracle oracle(agents);
  const Index pieces = out.pieces;
  out.piece_values.resize(n, pieces);
  for (Index i = 0; i < n; ++i)
    for (Index p = 0; p < pieces; ++p)
      out.piece_values(i, p) = oracle.eval(i, Rational(p, pieces), Rational(p + 1, pieces));
  out.meter = oracle.meter();

  const Instance inst(std::vector<Count>(u(n), 1), std::vector<Count>(u(pieces), 1), out.piece_values,
                      Kind::Goods);
  out.condition = ef_condition_goods(inst);

  const LpSolution sol = solve(build_gap_lp(inst));
  const SparseAllocation sparse = sparsify_to_vertex(sol, inst);
  const EnvyRounding rounded = round_envy(inst, sparse.allocation);
  out.allocation = rounded.allocation;
  out.piece_owner.assign(u(pieces), -1);
  for (Index p = 0; p < pieces; ++p)
    for (Index i = 0; i < n; ++i)
      if (out.allocation.counts(i, p) == 1) out.piece_owner[u(p)] = i;
  out.strong_ef = verify(inst, out.allocation, Notion::StrongEF);
  return out;
}

}  // namespace fairdiv
