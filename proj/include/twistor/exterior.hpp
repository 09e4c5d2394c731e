#pragma once

#include "linalg.hpp"
#include "scalar.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistor {

using Mask = std::uint32_t;

/// Error for mismatched dimensions or degrees between forms and maps.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline int popcount(Mask m) { return std::popcount(m); }

/// Sign and canonical mask of e^{i_1} ^ ... ^ e^{i_k} for an arbitrary index
/// order. Sign 0 signals a repeated index.
inline std::pair<int, Mask> ordered_monomial(const std::vector<int>& indices) {
  Mask mask = 0;
  int inversions = 0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    const Mask bit = Mask(1) << indices[a];
    if (mask & bit) return {0, 0};
    mask |= bit;
    for (std::size_t b = a + 1; b < indices.size(); ++b)
      if (indices[a] > indices[b]) ++inversions;
  }
  return {inversions % 2 ? -1 : 1, mask};
}

/// Sign of e^A ^ e^B relative to e^{A|B}; 0 when the supports overlap.
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += popcount(a >> (j + 1));
  }
  return swaps % 2 ? -1 : 1;
}

inline std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

/// Alternating k-form on an n-dimensional space. The coefficient of the
/// canonical monomial e^{i_1}^...^e^{i_k} (i_1 < ... < i_k) equals the value
/// of the form on (E_{i_1}, ..., E_{i_k}).
template <class S> class AltForm {
 public:
  AltForm() = default;
  AltForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > 31 || degree < 0 || degree > dim)
      throw StructuralError("form degree/dimension out of range");
  }

  static AltForm basis(int dim, int index) {
    AltForm f(dim, 1);
    f.set(Mask(1) << index, S(1));
    return f;
  }

  /// Monomial from an index list in arbitrary order, including its sign.
  static AltForm monomial(int dim, std::initializer_list<int> indices, const S& c = S(1)) {
    std::vector<int> idx(indices);
    AltForm f(dim, static_cast<int>(idx.size()));
    auto [sign, mask] = ordered_monomial(idx);
    if (sign != 0) f.set(mask, sign > 0 ? c : S(-c));
    return f;
  }

  static AltForm constant(int dim, const S& c) {
    AltForm f(dim, 0);
    f.set(0, c);
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<Mask, S>& terms() const { return terms_; }

  S coeff(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? S(0) : it->second;
  }

  void set(Mask m, const S& c) {
    if (popcount(m) != degree_ || (dim_ < 32 && (m >> dim_) != 0))
      throw StructuralError("mask does not match form degree");
    if (is_zero(c, Tolerance{0.0})) terms_.erase(m);
    else terms_[m] = c;
  }

  void add(Mask m, const S& c) {
    if (is_zero(c, Tolerance{0.0})) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second, Tolerance{0.0})) terms_.erase(it);
    }
  }

  /// Value on basis vectors E_{i_1},...,E_{i_k} in any order.
  S on_basis(const std::vector<int>& indices) const {
    if (static_cast<int>(indices.size()) != degree_) throw StructuralError("wrong number of arguments");
    auto [sign, mask] = ordered_monomial(indices);
    if (sign == 0) return S(0);
    S c = coeff(mask);
    return sign > 0 ? c : S(-c);
  }

  /// Value on arbitrary vectors: sum over monomials of coefficient times minor.
  S evaluate(const std::vector<std::vector<S>>& vectors) const {
    if (static_cast<int>(vectors.size()) != degree_) throw StructuralError("wrong number of arguments");
    S total(0);
    for (const auto& [mask, c] : terms_) {
      const auto idx = mask_indices(mask);
      Matrix<S> minor(degree_, degree_);
      for (int r = 0; r < degree_; ++r)
        for (int s = 0; s < degree_; ++s) minor(r, s) = vectors[s][idx[r]];
      total += c * determinant(minor);
    }
    return total;
  }

  bool is_zero_form(Tolerance tol = {}) const {
    for (const auto& [m, c] : terms_)
      if (!is_zero(c, tol)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& [k, c] : terms_) m = std::max(m, ScalarTraits<S>::abs_value(c));
    return m;
  }

  AltForm& operator+=(const AltForm& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  AltForm& operator-=(const AltForm& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add(m, S(-c));
    return *this;
  }
  AltForm& operator*=(const S& s) {
    if (is_zero(s, Tolerance{0.0})) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend AltForm operator+(AltForm a, const AltForm& b) { return a += b; }
  friend AltForm operator-(AltForm a, const AltForm& b) { return a -= b; }
  friend AltForm operator-(AltForm a) { return a *= S(-1); }
  friend AltForm operator*(AltForm a, const S& s) { return a *= s; }
  friend AltForm operator*(const S& s, AltForm a) { return a *= s; }

  friend bool operator==(const AltForm& a, const AltForm& b) {
    return a.dim_ == b.dim_ && a.degree_ == b.degree_ && (a - b).is_zero_form(Tolerance{0.0});
  }

  /// Coefficient vector over all canonical masks of this degree, in
  /// increasing mask order.
  std::vector<S> dense() const {
    std::vector<S> out;
    for (Mask m : masks_of_degree(dim_, degree_)) out.push_back(coeff(m));
    return out;
  }

  static AltForm from_dense(int dim, int degree, const std::vector<S>& values) {
    AltForm f(dim, degree);
    const auto masks = masks_of_degree(dim, degree);
    if (masks.size() != values.size()) throw StructuralError("dense coefficient vector has wrong length");
    for (std::size_t i = 0; i < masks.size(); ++i) f.set(masks[i], values[i]);
    return f;
  }

  static std::vector<Mask> masks_of_degree(int dim, int degree) {
    std::vector<Mask> out;
    for (Mask m = 0; m < (Mask(1) << dim); ++m)
      if (popcount(m) == degree) out.push_back(m);
    return out;
  }

  template <class T> AltForm<T> cast() const {
    AltForm<T> out(dim_, degree_);
    for (const auto& [m, c] : terms_) {
      if constexpr (std::is_same_v<S, T>) out.set(m, c);
      else out.set(m, scalar_from<T>(c));
    }
    return out;
  }

 private:
  static S determinant(Matrix<S> a) {
    const std::size_t n = a.rows();
    S det(1);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = n;
      double best = -1;
      for (std::size_t r = c; r < n; ++r) {
        if (is_zero(a(r, c), Tolerance{0.0})) continue;
        const double v = ScalarTraits<S>::abs_value(a(r, c));
        if (v > best) {
          best = v;
          piv = r;
        }
        if constexpr (ScalarTraits<S>::exact) break;
      }
      if (piv == n) return S(0);
      if (piv != c) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
        det = -det;
      }
      det *= a(c, c);
      for (std::size_t r = c + 1; r < n; ++r) {
        if (is_zero(a(r, c), Tolerance{0.0})) continue;
        const S f = a(r, c) / a(c, c);
        for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      }
    }
    return det;
  }

  void check_compatible(const AltForm& o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_) throw StructuralError("forms of different shape");
  }

  int dim_ = 0;
  int degree_ = 0;
  std::map<Mask, S> terms_;
};

template <class S> bool approx_equal(const AltForm<S>& a, const AltForm<S>& b, Tolerance tol = {}) {
  return a.dim() == b.dim() && a.degree() == b.degree() && (a - b).is_zero_form(tol);
}

template <class S> AltForm<S> wedge(const AltForm<S>& a, const AltForm<S>& b) {
  if (a.dim() != b.dim()) throw StructuralError("wedge of forms on different spaces");
  if (a.degree() + b.degree() > a.dim()) return AltForm<S>(a.dim(), a.dim());
  AltForm<S> out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      const int sign = wedge_sign(ma, mb);
      if (sign == 0) continue;
      out.add(ma | mb, sign > 0 ? S(ca * cb) : S(-(ca * cb)));
    }
  return out;
}

/// k-fold wedge power.
template <class S> AltForm<S> wedge_power(const AltForm<S>& a, int k) {
  AltForm<S> out = AltForm<S>::constant(a.dim(), S(1));
  for (int i = 0; i < k; ++i) out = wedge(out, a);
  return out;
}

/// Interior product: (i_v a)(X_2, ...) = a(v, X_2, ...).
template <class S> AltForm<S> interior(const std::vector<S>& v, const AltForm<S>& a) {
  if (a.degree() == 0) throw StructuralError("interior product of a 0-form");
  if (static_cast<int>(v.size()) != a.dim()) throw StructuralError("vector/form dimension mismatch");
  AltForm<S> out(a.dim(), a.degree() - 1);
  for (const auto& [mask, c] : a.terms()) {
    int pos = 0;
    for (Mask rest = mask; rest; rest &= rest - 1, ++pos) {
      const int i = std::countr_zero(rest);
      if (is_zero(v[i], Tolerance{0.0})) continue;
      S term = c * v[i];
      if (pos % 2) term = -term;
      out.add(mask & ~(Mask(1) << i), term);
    }
  }
  return out;
}

template <class S> AltForm<S> interior_basis(int index, const AltForm<S>& a) {
  std::vector<S> v(a.dim(), S(0));
  v[index] = S(1);
  return interior(v, a);
}

/// Pullback a(A., ..., A.) for a linear map A of the underlying space.
template <class S> AltForm<S> pullback(const Matrix<S>& map, const AltForm<S>& a) {
  const int n = a.dim();
  if (static_cast<int>(map.rows()) != n || static_cast<int>(map.cols()) != n)
    throw StructuralError("linear map does not act on the form's space");
  // Row j of the map is the pulled-back dual basis element e^j o A.
  std::vector<std::vector<std::pair<int, S>>> rows(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (!is_zero(map(j, i), Tolerance{0.0})) rows[j].push_back({i, map(j, i)});

  AltForm<S> out(n, a.degree());
  for (const auto& [mask, c] : a.terms()) {
    std::map<Mask, S> partial{{Mask(0), c}};
    for (int j : mask_indices(mask)) {
      std::map<Mask, S> next;
      for (const auto& [pm, pc] : partial)
        for (const auto& [i, v] : rows[j]) {
          const int sign = wedge_sign(pm, Mask(1) << i);
          if (sign == 0) continue;
          S term = pc * v;
          if (sign < 0) term = -term;
          auto [it, ins] = next.try_emplace(pm | (Mask(1) << i), term);
          if (!ins) it->second += term;
        }
      partial = std::move(next);
    }
    for (const auto& [pm, pc] : partial) out.add(pm, pc);
  }
  return out;
}

/// Natural action of an endomorphism D on forms as a derivation:
/// (D.a)(X_1, ..., X_k) = -sum_i a(X_1, ..., D X_i, ..., X_k).
template <class S> AltForm<S> derive(const Matrix<S>& d, const AltForm<S>& a) {
  const int n = a.dim();
  if (static_cast<int>(d.rows()) != n || static_cast<int>(d.cols()) != n)
    throw StructuralError("linear map does not act on the form's space");
  AltForm<S> out(n, a.degree());
  for (const auto& [mask, c] : a.terms()) {
    for (int j : mask_indices(mask)) {
      const Mask rest = mask & ~(Mask(1) << j);
      for (int i = 0; i < n; ++i) {
        if (is_zero(d(j, i), Tolerance{0.0})) continue;
        const Mask bit = Mask(1) << i;
        if (rest & bit) continue;
        // Replace e^j by e^i in place: the sign is the parity of indices of
        // `rest` strictly between i and j.
        const Mask lo = std::min(i, j), hi = std::max(i, j);
        const Mask between = rest & (((Mask(1) << hi) - 1) & ~((Mask(1) << (lo + 1)) - 1));
        S term = c * d(j, i);
        if (popcount(between) % 2 == 0) term = -term;
        out.add(rest | bit, term);
      }
    }
  }
  return out;
}

/// Relabel basis indices: e^i maps to e^{perm[i]}.
template <class S> AltForm<S> relabel(const AltForm<S>& a, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != a.dim()) throw StructuralError("permutation size mismatch");
  AltForm<S> out(a.dim(), a.degree());
  for (const auto& [mask, c] : a.terms()) {
    std::vector<int> idx;
    for (int i : mask_indices(mask)) idx.push_back(perm[i]);
    auto [sign, m] = ordered_monomial(idx);
    out.add(m, sign > 0 ? c : S(-c));
  }
  return out;
}

/// Action of an almost complex structure on k-forms: (A.a) = (-1)^k a(A., ..., A.).
template <class S> AltForm<S> acs_action(const Matrix<S>& acs, const AltForm<S>& a) {
  auto out = pullback(acs, a);
  if (a.degree() % 2) out *= S(-1);
  return out;
}

/// Dense trilinear form on an n-dimensional space.
template <class S> class Tensor3 {
 public:
  explicit Tensor3(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim, S(0)) {}

  static Tensor3 from_form(const AltForm<S>& a) {
    if (a.degree() != 3) throw StructuralError("expected a 3-form");
    Tensor3 t(a.dim());
    for (const auto& [mask, c] : a.terms()) {
      const auto idx = mask_indices(mask);
      static constexpr std::array<std::array<int, 3>, 6> perms{
          {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
      for (std::size_t p = 0; p < perms.size(); ++p)
        t(idx[perms[p][0]], idx[perms[p][1]], idx[perms[p][2]]) = p < 3 ? c : S(-c);
    }
    return t;
  }

  int dim() const { return dim_; }
  S& operator()(int i, int j, int k) { return data_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
  const S& operator()(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
  }

  Tensor3& operator+=(const Tensor3& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }

  /// Apply a linear map to one argument slot (0, 1 or 2).
  Tensor3 apply_in_slot(const Matrix<S>& map, int slot) const {
    Tensor3 out(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          S v(0);
          for (int a = 0; a < dim_; ++a) {
            const S& m = map(a, slot == 0 ? i : slot == 1 ? j : k);
            if (is_zero(m, Tolerance{0.0})) continue;
            v += m * (slot == 0 ? (*this)(a, j, k) : slot == 1 ? (*this)(i, a, k) : (*this)(i, j, a));
          }
          out(i, j, k) = v;
        }
    return out;
  }

  bool is_alternating(Tolerance tol = {}) const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          const S& v = (*this)(i, j, k);
          if (!is_zero(S(v + (*this)(j, i, k)), tol) || !is_zero(S(v + (*this)(i, k, j)), tol)) return false;
        }
    return true;
  }

  /// Totally skew part (1/6 sum over permutations with sign), as a 3-form.
  AltForm<S> skew_part() const {
    AltForm<S> out(dim_, 3);
    const S sixth = S(1) / S(6);
    for (Mask m : AltForm<S>::masks_of_degree(dim_, 3)) {
      const auto x = mask_indices(m);
      const int i = x[0], j = x[1], k = x[2];
      S v = (*this)(i, j, k) + (*this)(j, k, i) + (*this)(k, i, j) - (*this)(j, i, k) - (*this)(i, k, j) -
            (*this)(k, j, i);
      out.set(m, v * sixth);
    }
    return out;
  }

  /// Read off the canonical coefficients; requires the tensor to be alternating.
  AltForm<S> to_form(Tolerance tol = {}) const {
    if (!is_alternating(tol)) throw StructuralError("trilinear form is not alternating");
    AltForm<S> out(dim_, 3);
    for (Mask m : AltForm<S>::masks_of_degree(dim_, 3)) {
      const auto x = mask_indices(m);
      out.set(m, (*this)(x[0], x[1], x[2]));
    }
    return out;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : data_) m = std::max(m, ScalarTraits<S>::abs_value(x));
    return m;
  }

 private:
  int dim_;
  std::vector<S> data_;
};

enum class SlotPair { s12, s13, s23 };

/// A_{(pq)}a = a with A applied in the two named argument slots; the result
/// is trilinear but in general not alternating.
template <class S> Tensor3<S> slot_action(const Matrix<S>& map, const AltForm<S>& a, SlotPair slots) {
  if (a.degree() != 3) throw StructuralError("slot action needs a 3-form");
  const auto t = Tensor3<S>::from_form(a);
  switch (slots) {
    case SlotPair::s12: return t.apply_in_slot(map, 0).apply_in_slot(map, 1);
    case SlotPair::s13: return t.apply_in_slot(map, 0).apply_in_slot(map, 2);
    case SlotPair::s23: return t.apply_in_slot(map, 1).apply_in_slot(map, 2);
  }
  throw StructuralError("unknown slot pair");
}

/// L_A = A_{(12)} + A_{(13)} + A_{(23)} on 3-forms.
template <class S> AltForm<S> slot_sum(const Matrix<S>& map, const AltForm<S>& a) {
  auto t = slot_action(map, a, SlotPair::s12) + slot_action(map, a, SlotPair::s13) +
           slot_action(map, a, SlotPair::s23);
  return t.to_form(Tolerance{1e-9});
}

/// Symmetric positive definite bilinear form on the underlying space.
template <class S> class Metric {
 public:
  Metric() = default;
  explicit Metric(Matrix<S> g, Tolerance tol = {}) : g_(std::move(g)) {
    const std::size_t n = g_.rows();
    if (n != g_.cols()) throw std::domain_error("metric must be square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (!is_zero(S(g_(i, j) - g_(j, i)), tol)) throw std::domain_error("metric is not symmetric");
    // Positive pivots in symmetric elimination.
    Matrix<S> a = g_;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_zero(a(c, c), tol) || to_double(a(c, c)) < 0) throw std::domain_error("degenerate metric");
      for (std::size_t r = c + 1; r < n; ++r) {
        if (is_zero(a(r, c), Tolerance{0.0})) continue;
        const S f = a(r, c) / a(c, c);
        for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      }
    }
    inv_ = inverse(g_, tol);
  }

  static Metric diagonal(const std::vector<S>& d) {
    Matrix<S> g(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) g(i, i) = d[i];
    return Metric(std::move(g));
  }

  int dim() const { return static_cast<int>(g_.rows()); }
  const Matrix<S>& matrix() const { return g_; }
  const Matrix<S>& inverse_matrix() const { return inv_; }

  S operator()(const std::vector<S>& x, const std::vector<S>& y) const {
    S v(0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j)
        if (!is_zero(g_(i, j), Tolerance{0.0})) v += x[i] * g_(i, j) * y[j];
    return v;
  }

  /// g(X, Y) on basis vectors.
  const S& on_basis(int i, int j) const { return g_(i, j); }

  template <class T> Metric<T> cast() const { return Metric<T>(g_.template cast<T>()); }

 private:
  Matrix<S> g_, inv_;
};

/// Orthonormal-frame inner product sum_{i_1<...<i_k} a(E_I) b(E_I), without
/// 1/k! factors.
template <class S> S form_inner(const AltForm<S>& a, const AltForm<S>& b, const Metric<S>& g) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) throw StructuralError("inner product of unlike forms");
  if (g.dim() != a.dim()) throw StructuralError("metric dimension mismatch");
  const auto raised = pullback(g.inverse_matrix(), b);
  S total(0);
  for (const auto& [m, c] : a.terms()) total += c * raised.coeff(m);
  return total;
}

template <class S> S form_norm_sq(const AltForm<S>& a, const Metric<S>& g) { return form_inner(a, a, g); }

/// (L_w b)(X) = 1/2 sum_{i,j} w(E_i, E_j) b(E_i, E_j, X) over a g-orthonormal frame.
template <class S> AltForm<S> contract2(const AltForm<S>& w, const AltForm<S>& b, const Metric<S>& g) {
  if (w.degree() != 2 || b.degree() != 3) throw StructuralError("contraction needs a 2-form and a 3-form");
  if (w.dim() != b.dim() || g.dim() != w.dim()) throw StructuralError("contraction dimension mismatch");
  const auto raised = pullback(g.inverse_matrix(), w);
  AltForm<S> out(b.dim(), 1);
  for (const auto& [m, c] : raised.terms()) {
    const auto ij = mask_indices(m);
    out += interior_basis(ij[1], interior_basis(ij[0], b)) * c;
  }
  return out;
}

/// Splitting of a 2- or 3-form by type relative to an almost complex
/// structure: `pure` is the (k,0)+(0,k) part, `mixed` the remainder.
template <class S> struct TypeSplit {
  AltForm<S> pure;
  AltForm<S> mixed;
};

template <class S> void require_acs(const Matrix<S>& acs, Tolerance tol = {}) {
  const auto sq = acs * acs + Matrix<S>::identity(acs.rows());
  if (!sq.is_zero_matrix(tol)) throw std::domain_error("endomorphism does not square to -1");
}

template <class S> TypeSplit<S> hermitian_type_split(const AltForm<S>& a, const Matrix<S>& acs, Tolerance tol = {}) {
  require_acs(acs, tol);
  const S half = S(1) / S(2), quarter = S(1) / S(4);
  if (a.degree() == 2) {
    // b(I., I.) = -b on (2,0)+(0,2) and +b on (1,1).
    const auto rotated = pullback(acs, a);
    return {(a - rotated) * half, (a + rotated) * half};
  }
  if (a.degree() == 3) {
    // L_I has eigenvalue -3 on (3,0)+(0,3) and +1 on (2,1)+(1,2).
    const auto l = slot_sum(acs, a);
    return {(a - l) * quarter, (a * S(3) + l) * quarter};
  }
  throw StructuralError("type splitting implemented for degrees 2 and 3");
}

/// Lee form theta = L_w(dw) / (n/2 - 1); then w ^ theta is the part of dw
/// along w ^ (1-forms).
template <class S> AltForm<S> lee_form(const AltForm<S>& w, const AltForm<S>& dw, const Metric<S>& g) {
  const int half_dim = w.dim() / 2;
  if (half_dim < 2) throw StructuralError("Lee form needs dimension at least 4");
  return contract2(w, dw, g) * (S(1) / S(half_dim - 1));
}

}  // namespace twistor
