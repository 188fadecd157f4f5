#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "fairdiv/core.hpp"
#include "fairdiv/frobenius.hpp"
#include "support.hpp"

using namespace fairdiv;
using namespace testing_support;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("6/8") == Rational(3, 4));
  CHECK(parse_rational("5") == Rational(5));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), FairDivisionError);
  CHECK_THROWS_AS(parse_rational("abc"), FairDivisionError);
  CHECK_THROWS_AS(parse_rational(""), FairDivisionError);
}

TEST_CASE("instance construction sorts groups and validates") {
  const Instance inst = make({7, 5}, {3, 4}, {{1, 2}, {3, 4}});
  CHECK(inst.group_sizes() == std::vector<Count>{5, 7});
  CHECK(inst.value(0, 0) == 3);
  CHECK(inst.value(1, 1) == 2);
  CHECK(inst.group_order() == std::vector<Index>{1, 0});
  CHECK(inst.agents() == 12);
  CHECK(inst.items() == 7);

  CHECK_THROWS_AS(make({}, {1}, {{1}}), std::exception);
  CHECK_THROWS_AS(make({0}, {1}, {{1}}), FairDivisionError);
  CHECK_THROWS_AS(make({1}, {0}, {{1}}), FairDivisionError);
  CHECK_THROWS_AS(make({1, 1}, {1}, {{0}, {1}}), FairDivisionError);  // zero goods row
  CHECK_THROWS_AS(make({1, 1}, {1, 1}, {{1, 0}, {1, 1}}, Kind::Chores), FairDivisionError);
  CHECK_THROWS_AS(make({1, 1}, {1, 1}, {{1, -1}, {1, 1}}), FairDivisionError);
  CHECK_THROWS_AS(Instance({1, 1}, {1}, rationals({{1, 1}}), Kind::Goods), FairDivisionError);
}

TEST_CASE("normalization examples") {
  {
    const Instance inst = make({1}, {1, 1}, {{1, 0}});
    const VectorR v = normalize(inst, 0, Norm::L2);
    CHECK(v(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v(1) == 0);
  }
  {
    const Instance inst = make({1}, {1, 1}, {{3, 4}});
    const VectorR v = normalize(inst, 0, Norm::L2);
    CHECK(std::fabs(v(0) - 0.6L) < 1e-15L);
    CHECK(std::fabs(v(1) - 0.8L) < 1e-15L);
  }
  {
    const Instance inst = make({1}, {3, 1}, {{2, 2}});
    const VectorR v = normalize(inst, 0, Norm::L1);
    CHECK(v(0) == 0.25L);
    CHECK(v(1) == 0.25L);
    CHECK(normalize_l1_exact(inst, 0)(0) == Rational(1, 4));
  }
  const Instance chores = make({1}, {1}, {{2}}, Kind::Chores);
  CHECK_THROWS_AS(normalize(chores, 0, Norm::L2), FairDivisionError);
}

TEST_CASE("normalized rows have unit copy-weighted norm") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + static_cast<Index>(rng() % 4), t = 1 + static_cast<Index>(rng() % 6);
    std::vector<Count> copies;
    for (Index z = 0; z < t; ++z) copies.push_back(1 + static_cast<Count>(rng() % 9));
    const Instance inst(std::vector<Count>(static_cast<size_t>(d), 1), copies,
                        random_values(rng, d, t, 0, 100), Kind::Goods);
    for (Index i = 0; i < d; ++i) {
      const VectorR v2 = normalize(inst, i, Norm::L2);
      const VectorR v1 = normalize(inst, i, Norm::L1);
      Real s2 = 0, s1 = 0;
      for (Index z = 0; z < t; ++z) {
        s2 += static_cast<Real>(copies[static_cast<size_t>(z)]) * v2(z) * v2(z);
        s1 += static_cast<Real>(copies[static_cast<size_t>(z)]) * v1(z);
      }
      CHECK(std::fabs(s2 - 1) <= 1e-12L);
      CHECK(std::fabs(s1 - 1) <= 1e-12L);
    }
  }
}

TEST_CASE("divergence examples") {
  VectorR p(2), q(2);
  p << 1, 0;
  q << 0.5L, 0.5L;
  CHECK(std::fabs(divergence(Divergence::Chi2, p, q) - 1) < 1e-15L);
  p << 0.3L, 0.7L;
  CHECK(divergence(Divergence::KL, p, p) == 0);
  p << 0.5L, 0.5L;
  q << 0.25L, 0.75L;
  CHECK(std::fabs(divergence(Divergence::TV, p, q) - 0.25L) < 1e-15L);

  // Zero in P contributes nothing to KL; zero in Q alone is undefined.
  p << 0, 1;
  q << 0.5L, 0.5L;
  CHECK(std::fabs(divergence(Divergence::KL, p, q) - std::log(2.0L)) < 1e-15L);
  CHECK_THROWS_AS(divergence(Divergence::KL, q, p), FairDivisionError);
  CHECK_THROWS_AS(divergence(Divergence::Chi2, q, p), FairDivisionError);
}

TEST_CASE("divergences: identity, nonnegativity and Pinsker") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Index len = 2 + static_cast<Index>(rng() % 6);
    VectorQ a(len), b(len);
    Rational sa = 0, sb = 0;
    for (Index j = 0; j < len; ++j) {
      a(j) = Rational(static_cast<long>(rng() % 50));
      b(j) = Rational(1 + static_cast<long>(rng() % 50));
      sa += a(j);
      sb += b(j);
    }
    if (sa == 0) a(0) = sa = 1;
    VectorR p(len), q(len);
    for (Index j = 0; j < len; ++j) {
      p(j) = to_real(a(j) / sa);
      q(j) = to_real(b(j) / sb);
    }
    for (auto kind : {Divergence::Chi2, Divergence::KL, Divergence::TV}) {
      CHECK(divergence(kind, q, q) == 0);
      CHECK(divergence(kind, p, q) >= 0);
    }
    const Real tv = divergence(Divergence::TV, p, q);
    const Real kl = divergence(Divergence::KL, p, q);
    CHECK(tv <= std::sqrt(kl / 2) + 1e-9L);
  }
}

TEST_CASE("thresholds examples") {
  Thresholds th = thresholds({5, 7});
  CHECK(th.g == 1);
  CHECK(th.theta == 24);
  th = thresholds({1, 1, 1, 1});
  CHECK(th.g == 1);
  CHECK(th.theta == 0);
  th = thresholds({4, 6});
  CHECK(th.g == 2);
  CHECK(th.theta == 4);
}

TEST_CASE("every g-multiple from theta on is a combination of the sizes") {
  for (const std::vector<Count>& sizes :
       {std::vector<Count>{5, 7}, {3}, {4, 6}, {6, 10, 15}, {2, 3}, {1, 1}, {4, 9, 9}}) {
    const Thresholds th = thresholds(sizes);
    const auto ok = reachable_table(sizes, th.theta + 20 * th.g);
    for (Count k = th.theta; k <= th.theta + 20 * th.g; k += th.g) {
      if (k % th.g) continue;
      CHECK(ok[static_cast<size_t>(k)]);
      CHECK(is_representable(sizes, k));
    }
  }
}

TEST_CASE("gap report examples") {
  const Instance same = make({1, 1}, {2}, {{3}, {3}});
  CHECK(gap_report(same, counts({{1}, {1}})).min_gap == 0);

  const Instance orth = make({1, 1}, {1, 1}, {{1, 0}, {0, 1}});
  const GapReport rep = gap_report(orth, counts({{1, 0}, {0, 1}}));
  CHECK(rep.min_gap == 1);
  CHECK(rep.pair_gaps(0, 0) == 0);
  CHECK(rep.pair_gaps(0, 1) == 1);

  const Instance chores = make({1, 1}, {1, 1}, {{1, 1}, {1, 1}}, Kind::Chores);
  const GapReport crep = gap_report(chores, counts({{1, 0}, {0, 1}}));
  CHECK(crep.pair_gaps(0, 1) == 0);
  CHECK(crep.pair_gaps(1, 0) == 0);
  CHECK(crep.kind == Kind::Chores);

  CHECK_THROWS_AS(gap_report(orth, counts({{1, 0, 0}, {0, 1, 0}})), FairDivisionError);
}

TEST_CASE("verify examples") {
  const Instance same = make({1, 1}, {2}, {{3}, {3}});
  CHECK(verify(same, counts({{1}, {1}}), Notion::EF).holds);
  CHECK_FALSE(verify(same, counts({{1}, {1}}), Notion::StrongEF).holds);

  const Instance tefx = make({1, 1}, {1, 1}, {{10, 1}, {1, 1}});
  const Verdict v = verify(tefx, counts({{0, 0}, {1, 1}}), Notion::TEFX);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->agent == 0);
  CHECK(v.witness->other == 1);
  CHECK(v.witness->item == 1);

  const Instance orth = make({1, 1}, {1, 1}, {{1, 0}, {0, 1}});
  CHECK(verify(orth, counts({{1, 0}, {0, 1}}), Notion::StrongEF).holds);
  CHECK(verify(orth, counts({{1, 0}, {0, 1}}), Notion::StrongProp).holds);
  CHECK_FALSE(verify(orth, counts({{0, 1}, {1, 0}}), Notion::Prop).holds);

  CHECK_THROWS_AS(verify(orth, counts({{1, 0}, {0, 0}}), Notion::EF), FairDivisionError);
}

TEST_CASE("verify agrees with the gap report on random integral allocations") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 3), t = 1 + static_cast<Index>(rng() % 4);
    const Kind kind = trial % 2 ? Kind::Chores : Kind::Goods;
    std::vector<Count> sizes(static_cast<size_t>(d));
    for (auto& s : sizes) s = 1 + static_cast<Count>(rng() % 3);
    MatrixI a = MatrixI::Zero(d, t);
    std::vector<Count> copies(static_cast<size_t>(t), 0);
    for (Index z = 0; z < t; ++z) {
      for (Index i = 0; i < d; ++i) {
        a(i, z) = static_cast<Count>(rng() % 4);
        copies[static_cast<size_t>(z)] += a(i, z) * sizes[static_cast<size_t>(i)];
      }
      if (copies[static_cast<size_t>(z)] == 0) {
        a(0, z) = 1;
        copies[static_cast<size_t>(z)] = sizes[0];
      }
    }
    // Sizes are sorted by the instance; keep rows aligned by sorting first.
    std::vector<Index> perm(static_cast<size_t>(d));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](Index x, Index y) { return sizes[static_cast<size_t>(x)] < sizes[static_cast<size_t>(y)]; });
    IntegralAllocation alloc;
    alloc.counts.resize(d, t);
    for (Index r = 0; r < d; ++r) alloc.counts.row(r) = a.row(perm[static_cast<size_t>(r)]);

    const Instance inst(sizes, copies, random_values(rng, d, t, 1, 5), kind);
    const GapReport rep = gap_report(inst, alloc);
    // Independent gap computation.
    Rational least = 0;
    bool first = true;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        if (i == j) continue;
        const Rational own = direct_value(inst, i, alloc.counts, i);
        const Rational other = direct_value(inst, i, alloc.counts, j);
        const Rational g = kind == Kind::Goods ? Rational(own - other) : Rational(other - own);
        CHECK(rep.pair_gaps(i, j) == g);
        if (first || g < least) least = g;
        first = false;
      }
    CHECK(rep.min_gap == least);
    CHECK(verify(inst, alloc, Notion::EF).holds == (rep.min_gap >= 0));
    CHECK(verify(inst, alloc, Notion::StrongEF).holds == (rep.min_gap > 0));
  }
}
