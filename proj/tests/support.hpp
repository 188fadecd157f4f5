#pragma once

#include <random>
#include <vector>

#include "fairdiv/cake.hpp"
#include "fairdiv/core.hpp"

namespace testing_support {

using namespace fairdiv;

inline MatrixQ rationals(std::initializer_list<std::initializer_list<long>> rows) {
  MatrixQ m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (long v : r) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}

inline Instance make(std::vector<Count> sizes, std::vector<Count> copies,
                     std::initializer_list<std::initializer_list<long>> values,
                     Kind kind = Kind::Goods) {
  return Instance(std::move(sizes), std::move(copies), rationals(values), kind);
}

inline IntegralAllocation counts(std::initializer_list<std::initializer_list<long>> rows) {
  IntegralAllocation a;
  a.counts.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (long v : r) a.counts(i, j++) = v;
    ++i;
  }
  return a;
}

// Integer values in [lo, hi]; rows resampled until nonzero and pairwise distinct
// after normalization when `distinct` is set.
inline MatrixQ random_values(std::mt19937_64& rng, Index d, Index t, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  MatrixQ m(d, t);
  for (Index i = 0; i < d; ++i) {
    bool positive = false;
    while (!positive) {
      for (Index z = 0; z < t; ++z) {
        m(i, z) = Rational(dist(rng));
        positive = positive || m(i, z) > 0;
      }
    }
  }
  return m;
}

// Reachability of k as a nonnegative combination of sizes, by plain DP.
inline std::vector<bool> reachable_table(const std::vector<Count>& sizes, Count limit) {
  std::vector<bool> ok(static_cast<size_t>(limit + 1), false);
  ok[0] = true;
  for (Count k = 1; k <= limit; ++k)
    for (Count s : sizes)
      if (s <= k && ok[static_cast<size_t>(k - s)]) {
        ok[static_cast<size_t>(k)] = true;
        break;
      }
  return ok;
}

// Brute-force direct gap: value of one agent of i for j's bundle.
inline Rational direct_value(const Instance& inst, Index i, const MatrixI& counts, Index j) {
  Rational s = 0;
  for (Index z = 0; z < inst.types(); ++z) s += inst.value(i, z) * Rational(counts(j, z));
  return s;
}

// Piecewise-linear density with equally spaced breakpoints and integer values in [lo, hi].
inline PiecewiseLinearDensity random_density(std::mt19937_64& rng, int segments, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  std::vector<std::pair<Rational, Rational>> pts;
  for (int s = 0; s <= segments; ++s) pts.emplace_back(Rational(s, segments), Rational(dist(rng)));
  return PiecewiseLinearDensity(pts);
}

// Single agents sharing a base valuation, each value perturbed by at most
// `noise`. Values stay positive.
inline MatrixQ perturbed_rows(std::mt19937_64& rng, Index n, Index m, long base_lo, long base_hi, long noise) {
  std::uniform_int_distribution<long> base(base_lo, base_hi), jitter(-noise, noise);
  MatrixQ v(n, m);
  for (Index j = 0; j < m; ++j) {
    const long b = base(rng);
    for (Index i = 0; i < n; ++i) v(i, j) = Rational(std::max(1L, b + jitter(rng)));
  }
  return v;
}

}  // namespace testing_support
