#include <cmath>
#include <functional>
#include <random>

#include <doctest.h>

#include "fairdiv/lp.hpp"
#include "fairdiv/mechanisms.hpp"
#include "support.hpp"

using namespace fairdiv;
using namespace testing_support;

namespace {

// Best vertex by enumerating every choice of tight constraints (tiny LPs only).
// Returns nullopt when no vertex is feasible.
std::optional<Real> enumerate_vertices(const LinearProgram& lp) {
  const Index nv = lp.variables(), nc = lp.constraints();
  // Constraint pool: the rows, then x_v >= 0.
  const Index pool = nc + nv;
  std::optional<Real> best;
  std::vector<Index> pick(static_cast<size_t>(nv));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == nv) {
      MatrixR a(nv, nv);
      VectorR b(nv);
      for (Index r = 0; r < nv; ++r) {
        const Index c = pick[static_cast<size_t>(r)];
        if (c < nc) {
          a.row(r) = lp.rows.row(c);
          b(r) = lp.rhs(c);
        } else {
          a.row(r).setZero();
          a(r, c - nc) = 1;
          b(r) = 0;
        }
      }
      Eigen::FullPivLU<MatrixR> lu(a);
      if (lu.rank() < nv) return;
      const VectorR x = lu.solve(b);
      if ((x.array() < -1e-9L).any()) return;
      for (Index c = 0; c < nc; ++c) {
        const Real lhs = lp.rows.row(c).dot(x);
        switch (lp.relations[static_cast<size_t>(c)]) {
          case Relation::LessEqual: if (lhs > lp.rhs(c) + 1e-9L) return; break;
          case Relation::GreaterEqual: if (lhs < lp.rhs(c) - 1e-9L) return; break;
          case Relation::Equal: if (std::fabs(lhs - lp.rhs(c)) > 1e-9L) return; break;
        }
      }
      const Real obj = lp.objective.dot(x);
      if (!best || (lp.sense == Sense::Maximize ? obj > *best : obj < *best)) best = obj;
      return;
    }
    for (Index c = start; c < pool; ++c) {
      pick[static_cast<size_t>(depth)] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LinearProgram random_bounded_lp(std::mt19937_64& rng) {
  const Index nv = 1 + static_cast<Index>(rng() % 3), nc = 1 + static_cast<Index>(rng() % 4);
  LinearProgram lp(rng() % 2 ? Sense::Maximize : Sense::Minimize, nv, nc + 1);
  std::uniform_int_distribution<int> coef(-5, 9);
  for (Index v = 0; v < nv; ++v) lp.objective(v) = coef(rng);
  for (Index c = 0; c < nc; ++c) {
    for (Index v = 0; v < nv; ++v) lp.rows(c, v) = coef(rng);
    const int rel = static_cast<int>(rng() % 3);
    lp.set_row(c, rel == 0 ? Relation::LessEqual : rel == 1 ? Relation::GreaterEqual : Relation::Equal,
               static_cast<Real>(coef(rng)));
  }
  // A box keeps the feasible region bounded.
  lp.rows.row(nc).setOnes();
  lp.set_row(nc, Relation::LessEqual, 20);
  return lp;
}

Instance random_goods(std::mt19937_64& rng, Index d, Index t) {
  std::vector<Count> sizes(static_cast<size_t>(d)), copies(static_cast<size_t>(t));
  for (auto& s : sizes) s = 1 + static_cast<Count>(rng() % 4);
  for (auto& k : copies) k = 1 + static_cast<Count>(rng() % 30);
  return Instance(sizes, copies, random_values(rng, d, t, 0, 100), Kind::Goods);
}

Instance random_chores(std::mt19937_64& rng, Index d, Index t) {
  std::vector<Count> sizes(static_cast<size_t>(d)), copies(static_cast<size_t>(t));
  for (auto& s : sizes) s = 1 + static_cast<Count>(rng() % 4);
  for (auto& k : copies) k = 2 + static_cast<Count>(rng() % 30);
  return Instance(sizes, copies, random_values(rng, d, t, 1, 100), Kind::Chores);
}

}  // namespace

TEST_CASE("solver toys") {
  LinearProgram lp(Sense::Maximize, 1, 1);
  lp.objective(0) = 1;
  lp.rows(0, 0) = 1;
  lp.set_row(0, Relation::LessEqual, 3);
  LpSolution s = solve(lp);
  CHECK(s.status == LpStatus::Optimal);
  CHECK(std::fabs(s.objective_value - 3) < 1e-12L);
  CHECK(s.certified());

  lp.set_row(0, Relation::LessEqual, -1);
  CHECK(solve(lp).status == LpStatus::Infeasible);

  lp.set_row(0, Relation::GreaterEqual, 1);
  CHECK(solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("solver matches vertex enumeration and certifies optimality") {
  std::mt19937_64 rng(7);
  int optimal = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const LinearProgram lp = random_bounded_lp(rng);
    const LpSolution s = solve(lp);
    const auto ref = enumerate_vertices(lp);
    REQUIRE((s.status == LpStatus::Optimal) == ref.has_value());
    if (!ref) {
      CHECK(s.status == LpStatus::Infeasible);
      continue;
    }
    ++optimal;
    CHECK(std::fabs(s.objective_value - *ref) <= 1e-9L * std::max<Real>(1, std::fabs(*ref)));
    CHECK(s.certified());
    CHECK(std::fabs(s.dual_objective - lp.rhs.dot(s.duals)) <= 1e-9L * std::max<Real>(1, std::fabs(*ref)));
    // Determinism.
    const LpSolution again = solve(lp);
    CHECK((again.variable_values.array() == s.variable_values.array()).all());
  }
  CHECK(optimal > 100);
}

TEST_CASE("gap LP shape and small optima") {
  const Instance orth = make({1, 1}, {1, 1}, {{1, 0}, {0, 1}});
  const LinearProgram lp = build_gap_lp(orth);
  CHECK(lp.variables() == 5);
  CHECK(lp.constraints() == 4);
  const LpSolution s = solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(std::fabs(s.objective_value - 1) < 1e-9L);
  CHECK(s.certified());
  const FractionalAllocation x = gap_lp_allocation(orth, s);
  CHECK(std::fabs(x.shares(0, 0) - 1) < 1e-9L);
  CHECK(std::fabs(x.shares(1, 1) - 1) < 1e-9L);

  const SparseAllocation sp = sparsify_to_vertex(s, orth);
  CHECK(sp.positive_variables == 2);
  CHECK(sp.positive_variables <= 2 + 2);
  CHECK(sp.shared_type_count == 0);

  const Instance same = make({1, 2}, {3, 2}, {{1, 2}, {2, 4}});
  const LpSolution z = solve(build_gap_lp(same));
  REQUIRE(z.status == LpStatus::Optimal);
  CHECK(std::fabs(z.objective_value) < 1e-9L);

  CHECK_THROWS_AS(build_gap_lp(orth, Kind::Chores), FairDivisionError);
}

TEST_CASE("gap LP dominates the closed-form mechanisms") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 3), t = 1 + static_cast<Index>(rng() % 5);
    const bool goods = trial % 2 == 0;
    const Instance inst = goods ? random_goods(rng, d, t) : random_chores(rng, d, t);
    const LpSolution s = solve(build_gap_lp(inst));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.certified());
    const MechanismOutput mech = goods ? relative_norm(inst) : log_relative_norm(inst);
    // Independent normalized min-gap of the mechanism.
    Real best = std::numeric_limits<Real>::infinity();
    for (Index i = 0; i < d; ++i) {
      const Real norm = goods ? row_norm(inst, i, Norm::L2) : row_norm(inst, i, Norm::L1);
      for (Index j = 0; j < d; ++j) {
        if (i == j) continue;
        Real g = 0;
        for (Index z = 0; z < t; ++z)
          g += to_real(inst.value(i, z)) * (mech.allocation.shares(i, z) - mech.allocation.shares(j, z));
        best = std::min(best, (goods ? g : -g) / norm);
      }
    }
    CHECK(s.objective_value >= best - 1e-9L);
    CHECK(std::fabs(normalized_min_gap(inst, mech.allocation) - best) < 1e-9L);
  }
}

TEST_CASE("sparsified vertices respect the support bound and keep the min-gap") {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 200; ++trial) {
    const bool goods = trial % 3 != 0;
    const Instance inst = goods ? random_goods(rng, 3, 4) : random_chores(rng, 3, 4);
    const LpSolution s = solve(build_gap_lp(inst));
    REQUIRE(s.status == LpStatus::Optimal);
    const SparseAllocation sp = sparsify_to_vertex(s, inst);
    CHECK(sp.positive_variables <= 4 + 3 * 2);
    check_feasible(inst, sp.allocation);
    for (Index z = 0; z < inst.types(); ++z) {
      Real used = 0;
      for (Index i = 0; i < inst.groups(); ++i) used += static_cast<Real>(inst.size(i)) * sp.allocation.shares(i, z);
      CHECK(std::fabs(used - static_cast<Real>(inst.copies(z))) < 1e-9L);
    }
    CHECK(normalized_min_gap(inst, sp.allocation) >= s.objective_value - 1e-9L);
  }
}

TEST_CASE("proportionality LP") {
  const Instance one = make({1}, {1, 1, 1}, {{1, 2, 3}});
  LpSolution s = solve(build_prop_lp(one));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(std::fabs(s.objective_value - 1) < 1e-9L);

  const Instance orth = make({1, 1}, {1, 1}, {{1, 0}, {0, 1}});
  s = solve(build_prop_lp(orth));
  CHECK(std::fabs(s.objective_value - 1) < 1e-9L);

  const Instance same = make({1, 1}, {1, 1}, {{1, 1}, {1, 1}});
  s = solve(build_prop_lp(same));
  CHECK(std::fabs(s.objective_value - 0.5L) < 1e-9L);

  const Instance chores = make({1, 1}, {1, 1}, {{1, 1}, {1, 1}}, Kind::Chores);
  s = solve(build_prop_lp(chores));
  CHECK(std::fabs(s.objective_value - 0.5L) < 1e-9L);

  CHECK_THROWS_AS(build_prop_lp(make({2}, {1}, {{1}})), FairDivisionError);
  CHECK_THROWS_AS(build_prop_lp(make({1}, {2}, {{1}})), FairDivisionError);
}

TEST_CASE("edge generation agrees with the dense solve") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const Kind kind = trial % 2 ? Kind::Chores : Kind::Goods;
    const Index n = 2 + static_cast<Index>(rng() % 4), m = 3 + static_cast<Index>(rng() % 25);
    const Instance inst(std::vector<Count>(static_cast<size_t>(n), 1),
                        std::vector<Count>(static_cast<size_t>(m), 1),
                        random_values(rng, n, m, kind == Kind::Goods ? 0 : 1, 1000), kind);
    const LpSolution dense = solve_prop_lp(inst);
    PropLpOptions opt;
    opt.force_structured = true;
    const LpSolution eg = solve_prop_lp(inst, opt);
    REQUIRE(dense.status == LpStatus::Optimal);
    REQUIRE(eg.status == LpStatus::Optimal);
    CHECK(std::fabs(dense.objective_value - eg.objective_value) < 1e-9L);
    CHECK(eg.certified());
    CHECK(eg.variable_values.size() == 1 + n * m);
    const FractionalAllocation x = prop_lp_allocation(inst, eg);
    const MatrixR a = normalized(inst, Norm::L1);
    for (Index i = 0; i < n; ++i) {
      const Real u = a.row(i).dot(x.shares.row(i));
      if (kind == Kind::Goods) CHECK(u >= eg.objective_value - 1e-9L);
      else CHECK(u <= eg.objective_value + 1e-9L);
    }
  }
}
