#pragma once

// so(7) brackets computed directly from 7x7 matrix commutators, with
// coordinates obtained from the Frobenius Gram system of the basis. Used as an
// independent check on the structure-constant tables.

#include "twistor/lie.hpp"

#include <vector>

namespace oracle {

using twistor::Matrix;
using twistor::Rational;
using twistor::So7Data;
namespace so7 = twistor::so7;

inline Rational frobenius(const Matrix<Rational>& a, const Matrix<Rational>& b) { return (a.transpose() * b).trace(); }

/// Coordinates of a skew matrix by solving the Gram system of the basis under
/// the Frobenius inner product.
class FrobeniusCoordinates {
 public:
  explicit FrobeniusCoordinates(const So7Data& d) : d_(d), gram_inv_(so7::kDim, so7::kDim) {
    Matrix<Rational> gram(so7::kDim, so7::kDim);
    for (int i = 0; i < so7::kDim; ++i)
      for (int j = 0; j < so7::kDim; ++j) gram(i, j) = frobenius(d.element(i), d.element(j));
    gram_inv_ = inverse(gram);
  }

  std::vector<Rational> operator()(const Matrix<Rational>& x) const {
    std::vector<Rational> rhs(so7::kDim);
    for (int i = 0; i < so7::kDim; ++i) rhs[i] = frobenius(d_.element(i), x);
    return gram_inv_.apply(rhs);
  }

 private:
  const So7Data& d_;
  Matrix<Rational> gram_inv_;
};

inline Matrix<Rational> bracket_matrix(const So7Data& d, int i, int j) {
  auto b = d.element(i) * d.element(j) - d.element(j) * d.element(i);
  if (d.convention().bracket_sign < 0) b *= Rational(-1);
  return b;
}

/// [X_a, X_b]_m for local m indices, from matrix commutators.
inline std::vector<Rational> bracket_m(const So7Data& d, const FrobeniusCoordinates& coords, int a, int b) {
  const auto full = coords(bracket_matrix(d, so7::kFirstM + a, so7::kFirstM + b));
  return {full.begin() + so7::kFirstM, full.end()};
}

}  // namespace oracle
