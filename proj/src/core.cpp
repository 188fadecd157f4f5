#include "fairdiv/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fairdiv {

namespace {

FairDivisionError bad_rational(std::string_view text) {
  return FairDivisionError(ErrorKind::InvalidInput,
                           "not a rational number: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw bad_rational(text);
    Integer q{std::string(den)};
    if (q == 0) throw FairDivisionError(ErrorKind::InvalidInput, "zero denominator in '" + std::string(text) + "'");
    out = Rational(Integer(std::string(num)), q);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)))
      throw bad_rational(text);
    Integer scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole));
    Integer f = frac.empty() ? Integer(0) : Integer(std::string(frac));
    out = Rational(w * scale + f, scale);
  } else {
    if (!all_digits(s)) throw bad_rational(text);
    out = Rational(Integer(std::string(s)));
  }
  return negative ? Rational(-out) : out;
}

std::string to_string(const Rational& q) {
  const auto& den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str() + "/1";
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DegenerateAgent: return "degenerate-agent";
    case ErrorKind::DivergenceUndefined: return "divergence-undefined";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::IncompleteAllocation: return "incomplete-allocation";
    case ErrorKind::UnsupportedScope: return "unsupported-scope";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::InvariantViolation: return "invariant-violation";
    case ErrorKind::Unbounded: return "unbounded";
    case ErrorKind::InsufficientMass: return "insufficient-mass";
    case ErrorKind::CyclingGuard: return "cycling-guard";
    case ErrorKind::UndefinedShare: return "undefined-share";
  }
  return "unknown";
}

const char* to_string(Kind kind) { return kind == Kind::Goods ? "goods" : "chores"; }

const char* to_string(Notion notion) {
  switch (notion) {
    case Notion::EF: return "EF";
    case Notion::StrongEF: return "STRONG_EF";
    case Notion::Prop: return "PROP";
    case Notion::StrongProp: return "STRONG_PROP";
    case Notion::TEFX: return "TEFX";
    case Notion::EFX: return "EFX";
  }
  return "?";
}

Instance::Instance(std::vector<Count> group_sizes, std::vector<Count> type_copies,
                   MatrixQ values, Kind kind)
    : kind_(kind) {
  if (group_sizes.empty())
    throw FairDivisionError(ErrorKind::InvalidInput, "instance needs at least one group");
  if (type_copies.empty())
    throw FairDivisionError(ErrorKind::InvalidInput, "instance needs at least one item type");
  for (Count s : group_sizes)
    if (s < 1) throw FairDivisionError(ErrorKind::InvalidInput, "group sizes must be >= 1");
  for (Count k : type_copies)
    if (k < 1) throw FairDivisionError(ErrorKind::InvalidInput, "copy counts must be >= 1");
  const auto d = static_cast<Index>(group_sizes.size());
  const auto t = static_cast<Index>(type_copies.size());
  if (values.rows() != d || values.cols() != t)
    throw FairDivisionError(ErrorKind::DimensionMismatch,
                            "values must be " + std::to_string(d) + "x" + std::to_string(t));

  for (Index i = 0; i < d; ++i) {
    bool positive = false;
    for (Index z = 0; z < t; ++z) {
      const Rational& v = values(i, z);
      if (v < 0)
        throw FairDivisionError(ErrorKind::InvalidInput,
                                "negative value for group " + std::to_string(i));
      if (kind == Kind::Chores && v == 0)
        throw FairDivisionError(ErrorKind::InvalidInput,
                                "chore costs must be strictly positive (group " +
                                    std::to_string(i) + ", type " + std::to_string(z) + ")");
      positive = positive || v > 0;
    }
    if (!positive)
      throw FairDivisionError(ErrorKind::DegenerateAgent,
                              "group " + std::to_string(i) + " values every type at zero");
  }

  std::vector<Index> perm(static_cast<size_t>(d));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) {
    return group_sizes[static_cast<size_t>(a)] < group_sizes[static_cast<size_t>(b)];
  });
  sizes_.resize(static_cast<size_t>(d));
  order_.resize(static_cast<size_t>(d));
  values_.resize(d, t);
  for (Index r = 0; r < d; ++r) {
    Index src = perm[static_cast<size_t>(r)];
    sizes_[static_cast<size_t>(r)] = group_sizes[static_cast<size_t>(src)];
    order_[static_cast<size_t>(src)] = r;
    values_.row(r) = values.row(src);
  }
  copies_ = std::move(type_copies);
  agents_ = std::accumulate(sizes_.begin(), sizes_.end(), Count{0});
  items_ = std::accumulate(copies_.begin(), copies_.end(), Count{0});
}

bool Instance::single_agent_groups() const {
  return std::all_of(sizes_.begin(), sizes_.end(), [](Count s) { return s == 1; });
}

bool Instance::unit_copies() const {
  return std::all_of(copies_.begin(), copies_.end(), [](Count k) { return k == 1; });
}

Instance Instance::with_copies(std::vector<Count> type_copies) const {
  return Instance(sizes_, std::move(type_copies), values_, kind_);
}

VectorR copies_vector(const Instance& inst) {
  VectorR k(inst.types());
  for (Index z = 0; z < inst.types(); ++z) k(z) = static_cast<Real>(inst.copies(z));
  return k;
}

Rational row_norm_l1(const Instance& inst, Index group) {
  Rational s = 0;
  for (Index z = 0; z < inst.types(); ++z) s += inst.copies(z) * inst.value(group, z);
  return s;
}

Rational row_norm_l2_squared(const Instance& inst, Index group) {
  Rational s = 0;
  for (Index z = 0; z < inst.types(); ++z)
    s += inst.copies(z) * inst.value(group, z) * inst.value(group, z);
  return s;
}

Real row_norm(const Instance& inst, Index group, Norm norm) {
  if (norm == Norm::L1) return to_real(row_norm_l1(inst, group));
  return std::sqrt(to_real(row_norm_l2_squared(inst, group)));
}

VectorR normalize(const Instance& inst, Index group, Norm norm) {
  if (group < 0 || group >= inst.groups())
    throw FairDivisionError(ErrorKind::DimensionMismatch, "group index out of range");
  if (norm == Norm::L2 && inst.kind() == Kind::Chores)
    throw FairDivisionError(ErrorKind::UnsupportedScope, "chores are only l1-normalized");
  if (norm == Norm::L1) return normalize_l1_exact(inst, group).unaryExpr([](const Rational& q) {
    return to_real(q);
  });
  Real len = row_norm(inst, group, Norm::L2);
  if (len == 0) throw FairDivisionError(ErrorKind::DegenerateAgent, "zero valuation row");
  VectorR out(inst.types());
  for (Index z = 0; z < inst.types(); ++z) out(z) = to_real(inst.value(group, z)) / len;
  return out;
}

VectorQ normalize_l1_exact(const Instance& inst, Index group) {
  Rational len = row_norm_l1(inst, group);
  if (len == 0) throw FairDivisionError(ErrorKind::DegenerateAgent, "zero valuation row");
  VectorQ out(inst.types());
  for (Index z = 0; z < inst.types(); ++z) out(z) = inst.value(group, z) / len;
  return out;
}

MatrixR normalized(const Instance& inst, Norm norm) {
  MatrixR out(inst.groups(), inst.types());
  for (Index i = 0; i < inst.groups(); ++i) out.row(i) = normalize(inst, i, norm).transpose();
  return out;
}

Real divergence(Divergence kind, const VectorR& p, const VectorR& q, const VectorR& w) {
  if (p.size() != q.size() || p.size() != w.size())
    throw FairDivisionError(ErrorKind::DimensionMismatch, "divergence operands differ in length");
  if ((p.array() < 0).any() || (q.array() < 0).any())
    throw FairDivisionError(ErrorKind::Precondition, "probability vectors must be nonnegative");
  Real sp = (w.array() * p.array()).sum();
  Real sq = (w.array() * q.array()).sum();
  if (std::fabs(sp - 1) > 1e-9L || std::fabs(sq - 1) > 1e-9L)
    throw FairDivisionError(ErrorKind::Precondition, "probability vectors must sum to 1");

  Real acc = 0;
  for (Index j = 0; j < p.size(); ++j) {
    const Real a = p(j), b = q(j);
    switch (kind) {
      case Divergence::Chi2:
        if (b == 0) {
          if (a > 0)
            throw FairDivisionError(ErrorKind::DivergenceUndefined,
                                    "chi-squared undefined: Q vanishes where P does not");
          break;
        }
        acc += w(j) * (a - b) * (a - b) / b;
        break;
      case Divergence::KL:
        if (a == 0) break;
        if (b == 0)
          throw FairDivisionError(ErrorKind::DivergenceUndefined,
                                  "KL undefined: Q vanishes where P does not");
        acc += w(j) * a * std::log(a / b);
        break;
      case Divergence::TV:
        acc += w(j) * std::fabs(a - b);
        break;
    }
  }
  if (kind == Divergence::TV) acc /= 2;
  // Rounding can leave a tiny negative KL on near-identical inputs.
  return std::max<Real>(acc, 0);
}

Real divergence(Divergence kind, const VectorR& p, const VectorR& q) {
  return divergence(kind, p, q, VectorR::Ones(p.size()));
}

Count gcd_of(const std::vector<Count>& values) {
  Count g = 0;
  for (Count v : values) g = std::gcd(g, v);
  return g;
}

Thresholds thresholds(const std::vector<Count>& sizes) {
  if (sizes.empty()) throw FairDivisionError(ErrorKind::InvalidInput, "no group sizes");
  for (Count s : sizes)
    if (s < 1) throw FairDivisionError(ErrorKind::InvalidInput, "group sizes must be >= 1");
  auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  Thresholds th;
  th.g = gcd_of(sizes);
  th.theta = th.g * (*lo / th.g - 1) * (*hi / th.g - 1);
  return th;
}

namespace {

void check_shape(const Instance& inst, Index rows, Index cols) {
  if (rows != inst.groups() || cols != inst.types())
    throw FairDivisionError(ErrorKind::DimensionMismatch,
                            "allocation shape does not match the instance");
}

template <typename Scalar, typename Fill>
GapReportT<Scalar> build_report(const Instance& inst, Fill&& entry) {
  const Index d = inst.groups();
  GapReportT<Scalar> rep;
  rep.kind = inst.kind();
  rep.pair_gaps = Matrix<Scalar>::Zero(d, d);
  bool first = true;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      rep.pair_gaps(i, j) = entry(i, j);
      if (first || rep.pair_gaps(i, j) < rep.min_gap) {
        rep.min_gap = rep.pair_gaps(i, j);
        rep.argmin_row = i;
        rep.argmin_col = j;
        first = false;
      }
    }
  return rep;
}

}  // namespace

Rational bundle_value(const Instance& inst, Index i, const IntegralAllocation& alloc, Index j) {
  Rational s = 0;
  for (Index z = 0; z < inst.types(); ++z)
    if (alloc.counts(j, z) != 0) s += inst.value(i, z) * alloc.counts(j, z);
  return s;
}

GapReport gap_report(const Instance& inst, const IntegralAllocation& alloc) {
  check_shape(inst, alloc.counts.rows(), alloc.counts.cols());
  const Index d = inst.groups();
  MatrixQ val(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) val(i, j) = bundle_value(inst, i, alloc, j);
  const bool goods = inst.kind() == Kind::Goods;
  return build_report<Rational>(inst, [&](Index i, Index j) {
    return goods ? Rational(val(i, i) - val(i, j)) : Rational(val(i, j) - val(i, i));
  });
}

RealGapReport gap_report(const Instance& inst, const FractionalAllocation& alloc) {
  check_shape(inst, alloc.shares.rows(), alloc.shares.cols());
  const MatrixR v = to_real(inst.values());
  const MatrixR val = v * alloc.shares.transpose();
  const bool goods = inst.kind() == Kind::Goods;
  return build_report<Real>(inst, [&](Index i, Index j) {
    return goods ? val(i, i) - val(i, j) : val(i, j) - val(i, i);
  });
}

void check_feasible(const Instance& inst, const FractionalAllocation& alloc, Real tol) {
  check_shape(inst, alloc.shares.rows(), alloc.shares.cols());
  for (Index z = 0; z < inst.types(); ++z) {
    Real used = 0;
    for (Index i = 0; i < inst.groups(); ++i) {
      if (alloc.shares(i, z) < -tol)
        throw FairDivisionError(ErrorKind::InvalidInput, "negative fractional share");
      used += static_cast<Real>(inst.size(i)) * alloc.shares(i, z);
    }
    const Real cap = static_cast<Real>(inst.copies(z));
    if (used > cap * (1 + tol) + tol)
      throw FairDivisionError(ErrorKind::InvalidInput,
                              "type " + std::to_string(z) + " is over-allocated");
  }
}

void check_complete(const Instance& inst, const IntegralAllocation& alloc) {
  check_shape(inst, alloc.counts.rows(), alloc.counts.cols());
  for (Index z = 0; z < inst.types(); ++z) {
    Count used = 0;
    for (Index i = 0; i < inst.groups(); ++i) {
      if (alloc.counts(i, z) < 0)
        throw FairDivisionError(ErrorKind::IncompleteAllocation, "negative copy count");
      used += inst.size(i) * alloc.counts(i, z);
    }
    if (used != inst.copies(z))
      throw FairDivisionError(ErrorKind::IncompleteAllocation,
                              "type " + std::to_string(z) + " allocates " + std::to_string(used) +
                                  " of " + std::to_string(inst.copies(z)) + " copies");
  }
}

Verdict verify(const Instance& inst, const IntegralAllocation& alloc, Notion notion) {
  check_complete(inst, alloc);
  const Index d = inst.groups();
  const bool goods = inst.kind() == Kind::Goods;
  Verdict out;
  auto fail = [&](Index i, Index j, Index item) {
    out.holds = false;
    out.witness = Witness{i, j, item};
    return out;
  };

  switch (notion) {
    case Notion::EF:
    case Notion::StrongEF: {
      GapReport rep = gap_report(inst, alloc);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
          if (i == j) continue;
          const Rational& g = rep.pair_gaps(i, j);
          if (g < 0 || (notion == Notion::StrongEF && g == 0)) return fail(i, j, -1);
        }
      return out;
    }
    case Notion::Prop:
    case Notion::StrongProp: {
      for (Index i = 0; i < d; ++i) {
        Rational own = bundle_value(inst, i, alloc, i) * inst.agents();
        Rational total = row_norm_l1(inst, i);
        bool ok = goods ? own >= total : own <= total;
        if (notion == Notion::StrongProp) ok = ok && own != total;
        if (!ok) return fail(i, -1, -1);
      }
      return out;
    }
    case Notion::TEFX:
    case Notion::EFX: {
      if (!goods)
        throw FairDivisionError(ErrorKind::UnsupportedScope, "EFX-type checks are for goods");
      for (Index i = 0; i < d; ++i) {
        Rational own = bundle_value(inst, i, alloc, i);
        for (Index j = 0; j < d; ++j) {
          if (i == j) continue;
          Rational other = bundle_value(inst, i, alloc, j);
          for (Index z = 0; z < inst.types(); ++z) {
            if (alloc.counts(j, z) == 0) continue;
            const Rational& v = inst.value(i, z);
            bool ok = notion == Notion::TEFX ? own + v >= other - v : own >= other - v;
            if (!ok) return fail(i, j, z);
          }
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace fairdiv
