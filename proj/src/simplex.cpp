#include <algorithm>
#include <cmath>

#include "fairdiv/lp.hpp"

namespace fairdiv {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
  }
  return "?";
}

LinearProgram::LinearProgram(Sense s, Index variables, Index constraints)
    : sense(s),
      objective(VectorR::Zero(variables)),
      rows(MatrixR::Zero(constraints, variables)),
      relations(static_cast<size_t>(constraints), Relation::LessEqual),
      rhs(VectorR::Zero(constraints)) {}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, Real eps) : eps_(eps) {
    m_ = lp.constraints();
    nv_ = lp.variables();
    flip_.assign(static_cast<size_t>(m_), 1);
    rel_ = lp.relations;
    for (Index r = 0; r < m_; ++r)
      if (lp.rhs(r) < 0) {
        flip_[static_cast<size_t>(r)] = -1;
        if (rel_[static_cast<size_t>(r)] == Relation::LessEqual)
          rel_[static_cast<size_t>(r)] = Relation::GreaterEqual;
        else if (rel_[static_cast<size_t>(r)] == Relation::GreaterEqual)
          rel_[static_cast<size_t>(r)] = Relation::LessEqual;
      }

    Index slacks = 0, artificials = 0;
    for (auto rel : rel_) {
      if (rel != Relation::Equal) ++slacks;
      if (rel != Relation::LessEqual) ++artificials;
    }
    first_art_ = nv_ + slacks;
    ncols_ = first_art_ + artificials;
    T_.setZero(m_ + 1, ncols_ + 1);
    basis_.assign(static_cast<size_t>(m_), -1);
    home_.assign(static_cast<size_t>(m_), -1);

    Index s = nv_, a = first_art_;
    for (Index r = 0; r < m_; ++r) {
      const Real f = flip_[static_cast<size_t>(r)];
      T_.row(r).head(nv_) = f * lp.rows.row(r);
      T_(r, ncols_) = f * lp.rhs(r);
      switch (rel_[static_cast<size_t>(r)]) {
        case Relation::LessEqual:
          T_(r, s) = 1;
          basis_[static_cast<size_t>(r)] = s;
          home_[static_cast<size_t>(r)] = s;
          ++s;
          break;
        case Relation::GreaterEqual:
          T_(r, s) = -1;
          ++s;
          T_(r, a) = 1;
          basis_[static_cast<size_t>(r)] = a;
          home_[static_cast<size_t>(r)] = a;
          ++a;
          break;
        case Relation::Equal:
          T_(r, a) = 1;
          basis_[static_cast<size_t>(r)] = a;
          home_[static_cast<size_t>(r)] = a;
          ++a;
          break;
      }
    }
  }

  Index rows() const { return m_; }
  Index columns() const { return ncols_; }
  Index first_artificial() const { return first_art_; }
  const std::vector<Index>& basis() const { return basis_; }
  Real value() const { return T_(m_, ncols_); }
  long iterations() const { return iterations_; }

  // Installs the objective row for maximizing cost . columns.
  void set_objective(const VectorR& cost) {
    T_.row(m_).setZero();
    for (Index j = 0; j < ncols_; ++j) T_(m_, j) = -cost(j);
    for (Index r = 0; r < m_; ++r) {
      const Real cb = cost(basis_[static_cast<size_t>(r)]);
      if (cb != 0) T_.row(m_) += cb * T_.row(r);
    }
  }

  // Dantzig pricing; a run of degenerate pivots switches to Bland's rule until progress resumes.
  // Returns false if unbounded.
  bool optimize(bool allow_artificial, long max_iterations) {
    const Index limit = allow_artificial ? ncols_ : first_art_;
    long degenerate = 0;
    for (;;) {
      const bool bland = degenerate > 50;
      Index enter = -1;
      Real most = -eps_;
      for (Index j = 0; j < limit; ++j)
        if (T_(m_, j) < most) {
          enter = j;
          if (bland) break;
          most = T_(m_, j);
        }
      if (enter < 0) return true;
      Index leave = -1;
      Real best = 0;
      for (Index r = 0; r < m_; ++r) {
        const Real a = T_(r, enter);
        if (a <= eps_) continue;
        const Real ratio = T_(r, ncols_) / a;
        if (leave < 0 || ratio < best - eps_ ||
            (ratio <= best + eps_ && basis_[static_cast<size_t>(r)] < basis_[static_cast<size_t>(leave)])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      degenerate = best <= eps_ ? degenerate + 1 : 0;
      pivot(leave, enter);
      if (++iterations_ > max_iterations)
        throw FairDivisionError(ErrorKind::CyclingGuard,
                                "simplex exceeded " + std::to_string(max_iterations) + " pivots");
    }
  }

  // After phase one: pivot zero-level artificials out where possible.
  void expel_artificials() {
    for (Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<size_t>(r)] < first_art_) continue;
      Index col = -1;
      for (Index j = 0; j < first_art_; ++j)
        if (std::fabs(T_(r, j)) > 1e3L * eps_) {
          col = j;
          break;
        }
      if (col >= 0) pivot(r, col);
    }
  }

  VectorR primal() const {
    VectorR x = VectorR::Zero(ncols_);
    for (Index r = 0; r < m_; ++r) x(basis_[static_cast<size_t>(r)]) = T_(r, ncols_);
    return x;
  }

  // Multiplier of row r in the internal (flipped, maximizing) problem.
  Real internal_dual(Index r) const { return T_(m_, home_[static_cast<size_t>(r)]); }
  int flip(Index r) const { return flip_[static_cast<size_t>(r)]; }
  Relation internal_relation(Index r) const { return rel_[static_cast<size_t>(r)]; }

 private:
  void pivot(Index r, Index c) {
    T_.row(r) /= T_(r, c);
    T_(r, c) = 1;
    for (Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const Real f = T_(i, c);
      if (f == 0) continue;
      T_.row(i) -= f * T_.row(r);
      T_(i, c) = 0;
    }
    basis_[static_cast<size_t>(r)] = c;
  }

  Real eps_;
  Index m_ = 0, nv_ = 0, ncols_ = 0, first_art_ = 0;
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> T_;
  std::vector<int> flip_;
  std::vector<Relation> rel_;
  std::vector<Index> basis_;
  std::vector<Index> home_;
  long iterations_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverOptions& options) {
  if (lp.variables() < 1)
    throw FairDivisionError(ErrorKind::InvalidInput, "LP needs at least one variable");
  if (lp.rows.cols() != lp.variables() || lp.rhs.size() != lp.constraints() ||
      static_cast<Index>(lp.relations.size()) != lp.constraints())
    throw FairDivisionError(ErrorKind::DimensionMismatch, "LP arrays disagree in size");
  if (!lp.rows.allFinite() || !lp.objective.allFinite() || !lp.rhs.allFinite())
    throw FairDivisionError(ErrorKind::InvalidInput, "LP coefficients must be finite");

  Tableau tab(lp, options.pivot_tolerance);
  const Index m = tab.rows();
  const Index nv = lp.variables();
  const long max_it = options.max_iterations > 0
                          ? options.max_iterations
                          : 200L * static_cast<long>(m + tab.columns()) + 10000L;
  LpSolution sol;

  if (tab.first_artificial() < tab.columns()) {
    VectorR phase1 = VectorR::Zero(tab.columns());
    phase1.tail(tab.columns() - tab.first_artificial()).setConstant(-1);
    tab.set_objective(phase1);
    tab.optimize(true, max_it);
    const Real scale = std::max<Real>(1, lp.rhs.cwiseAbs().maxCoeff());
    if (tab.value() < -1e-9L * scale) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = tab.iterations();
      return sol;
    }
    tab.expel_artificials();
  }

  const Real sign = lp.sense == Sense::Maximize ? 1 : -1;
  VectorR cost = VectorR::Zero(tab.columns());
  cost.head(nv) = sign * lp.objective;
  tab.set_objective(cost);
  if (!tab.optimize(false, max_it)) {
    sol.status = LpStatus::Unbounded;
    sol.iterations = tab.iterations();
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.iterations = tab.iterations();
  const VectorR full = tab.primal();
  sol.variable_values = full.head(nv).cwiseMax(Real(0));
  sol.objective_value = lp.objective.dot(sol.variable_values);
  sol.basis = tab.basis();
  std::sort(sol.basis.begin(), sol.basis.end());

  // Dual multipliers, re-signed for the problem as posed.
  sol.duals.resize(m);
  VectorR internal(m);
  for (Index r = 0; r < m; ++r) {
    internal(r) = tab.internal_dual(r);
    sol.duals(r) = sign * tab.flip(r) * internal(r);
  }
  sol.dual_objective = lp.rhs.dot(sol.duals);
  sol.duality_gap = std::fabs(sol.objective_value - sol.dual_objective) /
                    std::max<Real>(1, std::fabs(sol.objective_value));

  // Dual feasibility of the internal maximization: A'^T y >= c', sign rules on y.
  Real infeas = 0;
  for (Index j = 0; j < nv; ++j) {
    Real lhs = 0;
    for (Index r = 0; r < m; ++r) lhs += tab.flip(r) * lp.rows(r, j) * internal(r);
    infeas = std::max(infeas, sign * lp.objective(j) - lhs);
  }
  for (Index r = 0; r < m; ++r) {
    if (tab.internal_relation(r) == Relation::LessEqual) infeas = std::max(infeas, -internal(r));
    if (tab.internal_relation(r) == Relation::GreaterEqual) infeas = std::max(infeas, internal(r));
  }
  sol.dual_infeasibility = infeas;

  Real resid = 0;
  const VectorR ax = lp.rows * sol.variable_values;
  for (Index r = 0; r < m; ++r) {
    const Real scale = std::max<Real>(1, std::fabs(lp.rhs(r)));
    Real v = 0;
    switch (lp.relations[static_cast<size_t>(r)]) {
      case Relation::LessEqual: v = ax(r) - lp.rhs(r); break;
      case Relation::GreaterEqual: v = lp.rhs(r) - ax(r); break;
      case Relation::Equal: v = std::fabs(ax(r) - lp.rhs(r)); break;
    }
    resid = std::max(resid, v / scale);
  }
  sol.primal_residual = std::max<Real>(resid, 0);
  return sol;
}

}  // namespace fairdiv
