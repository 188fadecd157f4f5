#include <cmath>
#include <random>

#include <doctest.h>

#include "fairdiv/conditions.hpp"
#include "fairdiv/pipeline.hpp"
#include "support.hpp"

using namespace fairdiv;
using namespace testing_support;

TEST_CASE("goods condition examples") {
  const ConditionReport same = ef_condition_goods(make({1, 1}, {4, 4}, {{1, 2}, {2, 4}}));
  CHECK(same.separation == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(same.satisfied);

  const ConditionReport orth = ef_condition_goods(make({1, 1}, {8, 8}, {{1, 0}, {0, 1}}));
  CHECK(static_cast<double>(orth.separation) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(orth.lambda == 2);
  CHECK(static_cast<double>(orth.threshold) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(static_cast<double>(orth.lhs) == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-15));
  CHECK(orth.satisfied);
  CHECK(orth.margin == doctest::Approx(static_cast<double>(orth.threshold - orth.lhs)));

  const ConditionReport single = ef_condition_goods(make({3}, {3}, {{1}}));
  CHECK(single.vacuous);
  CHECK(single.satisfied);
  CHECK(std::isinf(single.threshold));
}

TEST_CASE("one agent per group reduces to the n^3 forms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 3), t = 2 + static_cast<Index>(rng() % 3);
    const Instance inst(std::vector<Count>(static_cast<size_t>(n), 1),
                        std::vector<Count>(static_cast<size_t>(t), 1), random_values(rng, n, t, 1, 30), Kind::Goods);
    const ConditionReport r = mu_bound_goods(inst);
    if (r.unbounded) continue;
    const Real nn = static_cast<Real>(n);
    // d = n, theta = 0, n_d = 1 leaves lambda = n^2 in the bound, i.e. 2n^3 / min distance.
    CHECK(static_cast<double>(r.mu_raw) == doctest::Approx(static_cast<double>(2 * nn * nn * nn / r.separation)));
    const ConditionReport c = ef_condition_goods(inst);
    CHECK(c.lambda == doctest::Approx(static_cast<double>(nn * (nn - 1))));
  }
}

TEST_CASE("goods copy bound examples") {
  const ConditionReport r = mu_bound_goods(make({1, 1}, {1, 1}, {{1, 0}, {0, 1}}));
  CHECK(static_cast<double>(r.mu_raw) == doctest::Approx(8.0).epsilon(1e-14));
  REQUIRE(r.mu_bound);
  CHECK(*r.mu_bound == 8);

  const ConditionReport scaled = mu_bound_goods(make({1, 1}, {1, 1}, {{7, 0}, {0, 3}}));
  CHECK(*scaled.mu_bound == 8);

  const ConditionReport same = mu_bound_goods(make({1, 1}, {1, 1}, {{1, 1}, {2, 2}}));
  CHECK(same.unbounded);
  CHECK_FALSE(same.mu_bound);
}

TEST_CASE("copy bounds are multiples of g and at least theta") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Kind kind = trial % 2 ? Kind::Chores : Kind::Goods;
    const Index d = 2 + static_cast<Index>(rng() % 2), t = 2 + static_cast<Index>(rng() % 3);
    std::vector<Count> sizes(static_cast<size_t>(d));
    for (auto& s : sizes) s = 2 * (1 + static_cast<Count>(rng() % 3));
    const Instance inst(sizes, std::vector<Count>(static_cast<size_t>(t), 1),
                        random_values(rng, d, t, 1, 40), kind);
    const ConditionReport r = mu_bound(inst);
    if (r.unbounded) continue;
    REQUIRE(r.mu_bound);
    CHECK(*r.mu_bound % r.g == 0);
    CHECK(*r.mu_bound >= r.theta);
    CHECK(static_cast<Real>(*r.mu_bound) >= r.mu_raw - 1e-9L);
    CHECK(static_cast<Real>(*r.mu_bound) < r.mu_raw + static_cast<Real>(r.g) + static_cast<Real>(r.theta) + 1);
  }
}

TEST_CASE("round up copies") {
  CHECK(round_up_copies(7.2L, 2, 0) == 8);
  CHECK(round_up_copies(8, 2, 0) == 8);
  CHECK(round_up_copies(3, 5, 24) == 25);
  CHECK(round_up_copies(0, 1, 0) == 1);
  CHECK_THROWS_AS(round_up_copies(INFINITY, 1, 0), FairDivisionError);
}

TEST_CASE("chores condition examples") {
  const ConditionReport same = ef_condition_chores(make({1, 1}, {2, 2}, {{1, 3}, {2, 6}}, Kind::Chores));
  CHECK_FALSE(same.satisfied);
  CHECK(mu_bound_chores(make({1, 1}, {1, 1}, {{1, 3}, {2, 6}}, Kind::Chores)).unbounded);

  const Instance pair = make({1, 1}, {1, 1}, {{1, 3}, {3, 1}}, Kind::Chores);
  const ConditionReport c = ef_condition_chores(pair);
  // lambda = 2n(d(d-1) + t(theta + n + n_d - d - 1)) with d = n = t = 2, theta = 0, n_d = 1.
  CHECK(c.lambda == 2 * 2 * (2 + 2 * (0 + 2 + 1 - 2 - 1)));
  const Real kl = 0.25L * std::log(1.0L / 3) + 0.75L * std::log(3.0L);
  CHECK(static_cast<double>(c.separation) == doctest::Approx(static_cast<double>(kl)).epsilon(1e-14));
  CHECK(static_cast<double>(c.threshold) ==
        doctest::Approx(static_cast<double>(kl / (8 * std::log(4.0L)))).epsilon(1e-14));
  CHECK_FALSE(c.satisfied);

  const ConditionReport mu = mu_bound_chores(pair);
  REQUIRE(mu.mu_bound);
  CHECK(mu.mu_raw > 0);
  CHECK(std::isfinite(mu.mu_raw));
  CHECK(*mu.mu_bound >= 1);

  // At k = mu the pipeline returns an envy-free allocation.
  const Instance at_mu = make({1, 1}, {*mu.mu_bound, *mu.mu_bound}, {{1, 3}, {3, 1}}, Kind::Chores);
  CHECK(mu_bound_chores(at_mu).satisfied);
  CHECK(pipeline_allocate(at_mu).envy_free.holds);

  CHECK_THROWS_AS(ef_condition_chores(make({1, 1}, {1}, {{1}, {2}}, Kind::Chores)), FairDivisionError);
  CHECK_THROWS_AS(ef_condition_chores(make({1, 1}, {1, 1}, {{1, 3}, {3, 1}})), FairDivisionError);
}

TEST_CASE("proportionality condition examples") {
  CHECK_FALSE(prop_condition(make({1, 1}, {1, 1}, {{1, 2}, {1, 2}})).satisfied);

  const ConditionReport orth = prop_condition(make({1, 1}, {1, 1}, {{1, 0}, {0, 1}}));
  CHECK(static_cast<double>(orth.separation) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(static_cast<double>(orth.threshold) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(orth.lhs == 1);
  CHECK_FALSE(orth.satisfied);

  const ConditionReport chores = prop_condition(make({1, 1}, {1, 1}, {{1, 1}, {1, 1}}, Kind::Chores));
  CHECK(chores.separation == doctest::Approx(0.0));
  CHECK_FALSE(chores.satisfied);

  CHECK_THROWS_AS(prop_condition(make({2, 1}, {1, 1}, {{1, 2}, {2, 1}})), FairDivisionError);
  CHECK_THROWS_AS(prop_condition(make({1, 1}, {2, 1}, {{1, 2}, {2, 1}})), FairDivisionError);
}

TEST_CASE("tEFX condition examples") {
  CHECK(tefx_condition(make({1, 1}, {1, 1}, {{3, 5}, {3, 5}})).satisfied);

  const ConditionReport near = tefx_condition(make({1, 1}, {1, 1}, {{50, 50}, {45, 55}}));
  CHECK(static_cast<double>(near.separation) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(static_cast<double>(near.threshold) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(static_cast<double>(near.lhs) == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(near.satisfied);

  const ConditionReport far = tefx_condition(make({1, 1}, {1, 1}, {{9, 1}, {1, 9}}));
  CHECK(static_cast<double>(far.separation) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK_FALSE(far.satisfied);

  CHECK_THROWS_AS(tefx_condition(make({1, 1}, {1, 1}, {{1, 2}, {2, 1}}, Kind::Chores)), FairDivisionError);
}

TEST_CASE("cake epsilon") {
  const CakeEpsilon e = cake_epsilon(2, 1, 1);
  CHECK(e.bound_m == 2);
  const double expected = (std::sqrt(524.25) - 3.5) / 128;
  CHECK(static_cast<double>(e.epsilon_raw) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(e.pieces == static_cast<Count>(std::ceil(1 / expected)));
  CHECK(e.epsilon <= e.epsilon_raw);
  CHECK(e.query_budget == 2 * e.pieces);

  const CakeEpsilon capped = cake_epsilon(2, 4, 1e12L);
  CHECK(capped.epsilon_raw == doctest::Approx(0.25));
  CHECK(capped.pieces == 4);

  Real prev = cake_epsilon(2, 3, 0.5L).epsilon_raw;
  for (Count n = 4; n <= 64; n *= 2) {
    const Real cur = cake_epsilon(n, 3, 0.5L).epsilon_raw;
    CHECK(cur < prev);
    prev = cur;
  }

  CHECK_THROWS_AS(cake_epsilon(1, 1, 1), FairDivisionError);
  CHECK_THROWS_AS(cake_epsilon(2, 0, 1), FairDivisionError);
  CHECK_THROWS_AS(cake_epsilon(2, 1, -1), FairDivisionError);
}

TEST_CASE("goods technical inequality on a grid") {
  // As stated the bound only holds for b <= 1; with a(b+1) replaced by ab(b+1)
  // it holds for every b > 0.
  Real stated = 1, corrected = 1;
  for (int ia = 0; ia < 20; ++ia)
    for (int ib = 1; ib <= 25; ++ib)
      for (int ix = 0; ix < 20; ++ix) {
        const Real a = ia * 2.5L, b = ib * 0.8L;
        const Real x0 = a * (b + 1) / (2 * b);
        const Real x = x0 + (x0 + 1) * ix * ix / 40.0L;
        const Real slack = goods_lemma_slack(x, a, b);
        const Real scale = std::max<Real>(1, b * b * x);
        corrected = std::min(corrected, (slack + a * (b + 1) * (b - 1)) / scale);
        const Real bs = ib / 25.0L, xs0 = a * (bs + 1) / (2 * bs);
        stated = std::min(stated, goods_lemma_slack(xs0 + (xs0 + 1) * ix * ix / 40.0L, a, bs) /
                                      std::max<Real>(1, bs * bs * x));
      }
  CHECK(corrected >= -1e-9L);
  CHECK(stated >= -1e-9L);
  CHECK(goods_lemma_slack(6.5625L, 12.5L, 20) < -1000);
}

TEST_CASE("chores technical inequality on a grid") {
  Real worst = 1;
  for (int ix = 0; ix < 10; ++ix)
    for (int ia = 0; ia < 10; ++ia)
      for (int ib = 1; ib <= 10; ++ib)
        for (int ic = 0; ic < 10; ++ic) {
          const Real x = 0.01L + ix * ix * 1.5L, a = ia * 0.7L, b = ib * 0.3L, c = ic * ic * 0.9L;
          worst = std::min(worst, chores_lemma_slack(x, a, b, c));
        }
  CHECK(worst >= -1e-9L);
}

TEST_CASE("copy perturbation lemmas on random instances") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<Count> span(10, 200);
  for (int trial = 0; trial < 100; ++trial) {
    Count alpha = span(rng), beta = span(rng);
    if (alpha > beta) std::swap(alpha, beta);
    const Index d = 2 + static_cast<Index>(rng() % 3), t = 2 + static_cast<Index>(rng() % 4);
    std::vector<Count> copies(static_cast<size_t>(t));
    for (auto& k : copies) k = std::uniform_int_distribution<Count>(alpha, beta)(rng);
    const std::vector<Count> sizes(static_cast<size_t>(d), 1);
    const Instance goods(sizes, copies, random_values(rng, d, t, 0, 50), Kind::Goods);
    CHECK(copies_lemma_goods_slack(goods, alpha, beta) >= -1e-9L);
    const Instance chores(sizes, copies, random_values(rng, d, t, 1, 50), Kind::Chores);
    CHECK(copies_lemma_chores_slack(chores, alpha, beta) >= -1e-9L);
  }
  const Instance inst = make({1, 1}, {5, 9}, {{1, 2}, {2, 1}});
  CHECK_THROWS_AS(copies_lemma_goods_slack(inst, 6, 9), FairDivisionError);
}
