#pragma once

#include "scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace twistor {

/// Small dense row-major matrix over an arbitrary field.
template <class S> class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const S& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
  friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= S(-1); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (is_zero(aik, Tolerance{0.0})) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  std::vector<S> apply(const std::vector<S>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector product: shape mismatch");
    std::vector<S> out(rows_, S(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  S trace() const {
    S t(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  bool is_zero_matrix(Tolerance tol = {}) const {
    return std::all_of(data_.begin(), data_.end(), [&](const S& x) { return is_zero(x, tol); });
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : data_) m = std::max(m, ScalarTraits<S>::abs_value(x));
    return m;
  }

  const std::vector<S>& data() const { return data_; }

  template <class T> Matrix<T> cast() const {
    Matrix<T> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = convert<T>((*this)(i, j));
    return out;
  }

 private:
  template <class T> static T convert(const S& x) {
    if constexpr (std::is_same_v<S, T>) return x;
    else if constexpr (std::is_same_v<S, Rational>) return scalar_from<T>(x);
    else return T(x);
  }

  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: shape mismatch");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

template <class S> Matrix<S> commutator(const Matrix<S>& a, const Matrix<S>& b) { return a * b - b * a; }

template <class S> bool approx_equal(const Matrix<S>& a, const Matrix<S>& b, Tolerance tol = {}) {
  return (a - b).is_zero_matrix(tol);
}

template <class S> std::ostream& operator<<(std::ostream& os, const Matrix<S>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << to_string(m(i, j));
    os << '\n';
  }
  return os;
}

/// Reduced row echelon form, computed in place. Exact scalars pivot on the
/// first nonzero entry; floating point uses partial pivoting and treats
/// entries below `tol` times max(1, largest entry) as zero.
template <class S> struct RowEchelon {
  std::vector<std::vector<S>> rows;  // nonzero rows only, pivot-normalized
  std::vector<std::size_t> pivots;   // pivot column of each row
  std::size_t cols = 0;

  std::size_t rank() const { return pivots.size(); }

  /// Kernel basis in free-variable form: basis vector f has a 1 in free column
  /// f and zeros in every other free column.
  std::vector<std::vector<S>> kernel() const {
    std::vector<char> is_pivot(cols, 0);
    for (auto p : pivots) is_pivot[p] = 1;
    std::vector<std::vector<S>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
      if (is_pivot[f]) continue;
      std::vector<S> v(cols, S(0));
      v[f] = S(1);
      for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][f];
      basis.push_back(std::move(v));
    }
    return basis;
  }

  std::vector<std::size_t> free_columns() const {
    std::vector<char> is_pivot(cols, 0);
    for (auto p : pivots) is_pivot[p] = 1;
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < cols; ++f)
      if (!is_pivot[f]) out.push_back(f);
    return out;
  }
};

template <class S>
RowEchelon<S> row_reduce(std::vector<std::vector<S>> a, std::size_t cols, Tolerance tol = {}) {
  constexpr bool exact = ScalarTraits<S>::exact;
  double scale = 0;
  if constexpr (!exact) {
    for (const auto& row : a)
      for (const auto& x : row) scale = std::max(scale, std::fabs(to_double(x)));
    scale = std::max(scale, 1.0);
  }
  const Tolerance rel{tol.abs * scale};

  RowEchelon<S> out;
  out.cols = cols;
  std::size_t top = 0;
  for (std::size_t c = 0; c < cols && top < a.size(); ++c) {
    std::size_t piv = a.size();
    if constexpr (exact) {
      for (std::size_t r = top; r < a.size(); ++r)
        if (!is_zero(a[r][c])) {
          piv = r;
          break;
        }
    } else {
      double best = rel.abs;
      for (std::size_t r = top; r < a.size(); ++r)
        if (std::fabs(a[r][c]) > best) {
          best = std::fabs(a[r][c]);
          piv = r;
        }
    }
    if (piv == a.size()) continue;
    std::swap(a[top], a[piv]);
    auto& prow = a[top];
    const S inv = S(1) / prow[c];
    for (std::size_t j = c; j < cols; ++j)
      if (!is_zero(prow[j], Tolerance{0.0})) prow[j] *= inv;
    // Nonzero positions of the pivot row, reused for every elimination.
    std::vector<std::size_t> nz;
    for (std::size_t j = c; j < cols; ++j)
      if (!is_zero(prow[j], Tolerance{0.0})) nz.push_back(j);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == top || is_zero(a[r][c], Tolerance{0.0})) continue;
      const S f = a[r][c];
      for (auto j : nz) a[r][j] -= f * prow[j];
      if constexpr (!exact) a[r][c] = 0;
    }
    out.pivots.push_back(c);
    ++top;
  }
  a.resize(top);
  out.rows = std::move(a);
  return out;
}

template <class S> std::size_t rank(const std::vector<std::vector<S>>& vectors, Tolerance tol = {}) {
  if (vectors.empty()) return 0;
  return row_reduce(vectors, vectors.front().size(), tol).rank();
}

/// Inverse by Gauss-Jordan; throws on a singular matrix.
template <class S> Matrix<S> inverse(const Matrix<S>& m, Tolerance tol = {}) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("inverse of a non-square matrix");
  std::vector<std::vector<S>> aug(n, std::vector<S>(2 * n, S(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m(i, j);
    aug[i][n + i] = S(1);
  }
  auto rr = row_reduce(std::move(aug), 2 * n, tol);
  if (rr.rank() < n || rr.pivots[n - 1] != n - 1) throw std::domain_error("singular matrix");
  Matrix<S> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = rr.rows[i][n + j];
  return inv;
}

/// Incremental joint kernel of several linear operators on a common space.
/// Each operator is supplied as a callable mapping a vector of the space to
/// its image; the basis shrinks after every constraint.
template <class S> class JointKernel {
 public:
  explicit JointKernel(std::size_t dim, Tolerance tol = {}) : dim_(dim), tol_(tol) {
    basis_.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<S> e(dim, S(0));
      e[i] = S(1);
      basis_.push_back(std::move(e));
    }
  }

  template <class Op> void constrain(Op&& op) {
    if (basis_.empty()) return;
    std::vector<std::vector<S>> images;
    images.reserve(basis_.size());
    for (const auto& v : basis_) images.push_back(op(v));
    const std::size_t out_dim = images.front().size();
    // Columns of the restricted operator are the images; kernel of the
    // out_dim x d matrix gives combinations of the current basis.
    std::vector<std::vector<S>> rowsm(out_dim, std::vector<S>(basis_.size(), S(0)));
    for (std::size_t j = 0; j < images.size(); ++j)
      for (std::size_t i = 0; i < out_dim; ++i) rowsm[i][j] = images[j][i];
    // Drop identically zero rows before reduction.
    rowsm.erase(std::remove_if(rowsm.begin(), rowsm.end(),
                               [](const std::vector<S>& r) {
                                 return std::all_of(r.begin(), r.end(),
                                                    [](const S& x) { return is_zero(x, Tolerance{0.0}); });
                               }),
                rowsm.end());
    auto rr = row_reduce(std::move(rowsm), basis_.size(), tol_);
    auto coeffs = rr.kernel();
    std::vector<std::vector<S>> next;
    next.reserve(coeffs.size());
    for (const auto& c : coeffs) {
      std::vector<S> v(dim_, S(0));
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (is_zero(c[j], Tolerance{0.0})) continue;
        for (std::size_t i = 0; i < dim_; ++i)
          if (!is_zero(basis_[j][i], Tolerance{0.0})) v[i] += c[j] * basis_[j][i];
      }
      next.push_back(std::move(v));
    }
    basis_ = std::move(next);
    if constexpr (!ScalarTraits<S>::exact) orthonormalize();
  }

  std::size_t dimension() const { return basis_.size(); }
  const std::vector<std::vector<S>>& basis() const { return basis_; }

 private:
  // Modified Gram-Schmidt; keeps floating-point kernels well conditioned
  // across many successive constraints.
  void orthonormalize() {
    std::vector<std::vector<S>> out;
    for (auto v : basis_) {
      for (const auto& u : out) {
        S dot(0);
        for (std::size_t i = 0; i < dim_; ++i) dot += u[i] * v[i];
        for (std::size_t i = 0; i < dim_; ++i) v[i] -= dot * u[i];
      }
      S norm(0);
      for (const auto& x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm <= tol_.abs) continue;
      for (auto& x : v) x /= norm;
      out.push_back(std::move(v));
    }
    basis_ = std::move(out);
  }

  std::size_t dim_;
  Tolerance tol_;
  std::vector<std::vector<S>> basis_;
};

}  // namespace twistor
