#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace fairdiv {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
// 64-bit mantissa on x86; every irrational quantity (sqrt, log) lives here.
using Real = long double;
using Count = std::int64_t;
using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixQ = Matrix<Rational>;
using VectorQ = Vector<Rational>;
using MatrixR = Matrix<Real>;
using VectorR = Vector<Real>;
using MatrixI = Matrix<Count>;
using VectorI = Vector<Count>;

// Accepts "p/q", "p", and plain decimals such as "0.25"; result is in lowest terms.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

inline Real to_real(const Rational& q) { return static_cast<Real>(q); }
// Exact: every finite long double is a dyadic rational.
inline Rational to_rational(Real x) { return Rational(x); }

template <typename To, typename Derived>
Matrix<To> cast_matrix(const Eigen::MatrixBase<Derived>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = static_cast<To>(m(i, j));
  return out;
}

inline MatrixR to_real(const MatrixQ& m) { return cast_matrix<Real>(m); }

}  // namespace fairdiv
