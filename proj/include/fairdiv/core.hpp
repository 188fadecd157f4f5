#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairdiv/numeric.hpp"

namespace fairdiv {

enum class Kind { Goods, Chores };
enum class Norm { L1, L2 };
enum class Divergence { Chi2, KL, TV };
enum class Notion { EF, StrongEF, Prop, StrongProp, TEFX, EFX };

enum class ErrorKind {
  InvalidInput,
  DegenerateAgent,
  DivergenceUndefined,
  DimensionMismatch,
  IncompleteAllocation,
  UnsupportedScope,
  Precondition,
  InvariantViolation,
  Unbounded,
  InsufficientMass,
  CyclingGuard,
  UndefinedShare,
};

const char* to_string(ErrorKind kind);
const char* to_string(Kind kind);
const char* to_string(Notion notion);

class FairDivisionError : public std::runtime_error {
 public:
  FairDivisionError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Groups of identical agents facing item types with multiplicities.
/// Groups are kept sorted by size; values(i, z) is the value (or cost) of one
/// copy of type z to each agent of group i.
class Instance {
 public:
  Instance(std::vector<Count> group_sizes, std::vector<Count> type_copies, MatrixQ values,
           Kind kind);

  Index groups() const { return static_cast<Index>(sizes_.size()); }
  Index types() const { return static_cast<Index>(copies_.size()); }
  Count agents() const { return agents_; }
  Count items() const { return items_; }
  Kind kind() const { return kind_; }

  const std::vector<Count>& group_sizes() const { return sizes_; }
  const std::vector<Count>& type_copies() const { return copies_; }
  Count size(Index i) const { return sizes_[static_cast<size_t>(i)]; }
  Count copies(Index z) const { return copies_[static_cast<size_t>(z)]; }
  const MatrixQ& values() const { return values_; }
  const Rational& value(Index i, Index z) const { return values_(i, z); }

  // Position of each input group after sorting.
  const std::vector<Index>& group_order() const { return order_; }

  bool single_agent_groups() const;
  bool unit_copies() const;

  Instance with_copies(std::vector<Count> type_copies) const;

 private:
  std::vector<Count> sizes_;
  std::vector<Count> copies_;
  MatrixQ values_;
  Kind kind_;
  Count agents_ = 0;
  Count items_ = 0;
  std::vector<Index> order_;
};

/// Per-agent copy shares: shares(i, z) copies of type z go to each agent of group i.
struct FractionalAllocation {
  MatrixR shares;
  bool complete = false;
};

/// Integer copies of each type per agent; every agent of a group holds the same bundle.
struct IntegralAllocation {
  MatrixI counts;
};

template <typename Scalar>
struct GapReportT {
  Matrix<Scalar> pair_gaps;
  Scalar min_gap{};
  Kind kind = Kind::Goods;
  Index argmin_row = -1;
  Index argmin_col = -1;
};
using GapReport = GapReportT<Rational>;
using RealGapReport = GapReportT<Real>;

struct Thresholds {
  Count g = 1;
  Count theta = 0;
};

struct Witness {
  Index agent = -1;
  Index other = -1;
  Index item = -1;
};

struct Verdict {
  bool holds = true;
  std::optional<Witness> witness;
  explicit operator bool() const { return holds; }
};

// Copy-weighted norm of a value row.
Real row_norm(const Instance& inst, Index group, Norm norm);
Rational row_norm_l1(const Instance& inst, Index group);
Rational row_norm_l2_squared(const Instance& inst, Index group);

VectorR normalize(const Instance& inst, Index group, Norm norm);
MatrixR normalized(const Instance& inst, Norm norm);
VectorQ normalize_l1_exact(const Instance& inst, Index group);

// Copy-weighted squared distance sum_z k_z (a_z - b_z)^2.
template <typename DA, typename DB, typename DW>
typename DA::Scalar weighted_sq_distance(const Eigen::MatrixBase<DA>& a,
                                         const Eigen::MatrixBase<DB>& b,
                                         const Eigen::MatrixBase<DW>& w) {
  return (w.array() * (a - b).array().square()).sum();
}

/// Divergence between probability vectors given per-entry multiplicities:
/// entry z stands for weights[z] identical coordinates.
Real divergence(Divergence kind, const VectorR& p, const VectorR& q, const VectorR& weights);
Real divergence(Divergence kind, const VectorR& p, const VectorR& q);

Thresholds thresholds(const std::vector<Count>& group_sizes);
Count gcd_of(const std::vector<Count>& values);

VectorR copies_vector(const Instance& inst);

GapReport gap_report(const Instance& inst, const IntegralAllocation& alloc);
RealGapReport gap_report(const Instance& inst, const FractionalAllocation& alloc);

// Value of one agent of group i for the per-agent bundle of group j.
Rational bundle_value(const Instance& inst, Index i, const IntegralAllocation& alloc, Index j);

void check_feasible(const Instance& inst, const FractionalAllocation& alloc, Real tol = 1e-9L);
void check_complete(const Instance& inst, const IntegralAllocation& alloc);

Verdict verify(const Instance& inst, const IntegralAllocation& alloc, Notion notion);

}  // namespace fairdiv
