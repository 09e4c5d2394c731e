#pragma once

#include "exterior.hpp"
#include "linalg.hpp"
#include "scalar.hpp"

#include <array>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace twistor {

/// Raised when no sign convention reproduces the structure equations, or a
/// supplied element lies outside the expected subalgebra.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

namespace so7 {

inline constexpr int kAmbient = 7;  // R^7 = R + C^3, basis 0,1,2,3,1',2',3'
inline constexpr int kDim = 21;
inline constexpr int kSu3 = 8;
inline constexpr int kU3 = 9;
inline constexpr int kM = 12;
inline constexpr int kN = 13;
inline constexpr int kIndexE = 8;   // position of E in the 21-element basis
inline constexpr int kFirstM = 9;   // A..C', P..R' follow

/// Local indices of the tangent basis A,B,C,A',B',C',P,Q,R,P',Q',R' (and of
/// the dual one-forms a,...,r').
enum MIndex : int { A = 0, B, C, Ap, Bp, Cp, P, Q, R, Pp, Qp, Rp };
inline constexpr int kE_N = 12;  // e in the basis of n = m + RE

inline const std::array<const char*, kM> kMLabels{"A", "B", "C", "A'", "B'", "C'",
                                                   "P", "Q", "R", "P'", "Q'", "R'"};
inline const std::array<const char*, kM> kDualLabels{"a", "b", "c", "a'", "b'", "c'",
                                                      "p", "q", "r", "p'", "q'", "r'"};
inline const std::array<const char*, kDim> kLabels{
    "R12", "R13", "R23", "S12", "S13", "S23", "D1", "D2", "E", "A", "B",
    "C",   "A'",  "B'",  "C'",  "P",   "Q",   "R",  "P'", "Q'", "R'"};

/// Cyclic relabelling (a,a',p,p') -> (b,b',q,q') -> (c,c',r,r') on m.
inline std::vector<int> cyclic_permutation() { return {1, 2, 0, 4, 5, 3, 7, 8, 6, 10, 11, 9}; }

}  // namespace so7

/// Sign conventions fixing so(7): whether i^j maps e_i to +e_j (or -e_j), and
/// whether [X,Y] = XY - YX (or YX - XY).
struct So7Convention {
  int generator_sign = 1;
  int bracket_sign = 1;
};

/// so(7) as skew 7x7 matrices with the named basis and its structure
/// constants, split as u(3) + m with u(3) = su(3) + RE.
class So7Data {
 public:
  static So7Data with_convention(So7Convention conv) {
    So7Data d;
    d.conv_ = conv;
    d.build_basis();
    d.build_constants();
    return d;
  }

  const So7Convention& convention() const { return conv_; }
  const Matrix<Rational>& element(int i) const { return basis_[i]; }

  /// Structure constant c_{ij}^k: [X_i, X_j] = sum_k c_{ij}^k X_k.
  const Rational& c(int i, int j, int k) const { return c_[(i * so7::kDim + j) * so7::kDim + k]; }

  /// Coordinates of a skew 7x7 matrix in the 21-element basis.
  std::vector<Rational> coordinates(const Matrix<Rational>& x) const {
    std::vector<Rational> upper;
    for (int i = 0; i < so7::kAmbient; ++i)
      for (int j = i + 1; j < so7::kAmbient; ++j) upper.push_back(x(i, j));
    return to_coords_.apply(upper);
  }

  Matrix<Rational> matrix_of(const std::vector<Rational>& coords) const {
    Matrix<Rational> out(so7::kAmbient, so7::kAmbient);
    for (int i = 0; i < so7::kDim; ++i)
      if (sgn(coords[i]) != 0) out += basis_[i] * coords[i];
    return out;
  }

  /// Bracket of coordinate vectors through the structure constants.
  std::vector<Rational> bracket(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
    std::vector<Rational> out(so7::kDim, Rational(0));
    for (int i = 0; i < so7::kDim; ++i) {
      if (sgn(x[i]) == 0) continue;
      for (int j = 0; j < so7::kDim; ++j) {
        if (sgn(y[j]) == 0) continue;
        const Rational xy = x[i] * y[j];
        for (int k = 0; k < so7::kDim; ++k)
          if (sgn(c(i, j, k)) != 0) out[k] += xy * c(i, j, k);
      }
    }
    return out;
  }

  /// Matrix commutator with the chosen bracket order.
  Matrix<Rational> matrix_bracket(const Matrix<Rational>& x, const Matrix<Rational>& y) const {
    auto b = commutator(x, y);
    if (conv_.bracket_sign < 0) b *= Rational(-1);
    return b;
  }

  /// Copy with one structure constant shifted (and its antisymmetric partner);
  /// used for fault injection in the self-test.
  So7Data perturbed(int i, int j, int k, const Rational& delta) const {
    So7Data d = *this;
    d.c_[(i * so7::kDim + j) * so7::kDim + k] += delta;
    d.c_[(j * so7::kDim + i) * so7::kDim + k] -= delta;
    return d;
  }

  /// Structure constants as (i, j, k, c) with i < j and c != 0.
  std::vector<std::tuple<int, int, int, Rational>> nonzero_constants() const {
    std::vector<std::tuple<int, int, int, Rational>> out;
    for (int i = 0; i < so7::kDim; ++i)
      for (int j = i + 1; j < so7::kDim; ++j)
        for (int k = 0; k < so7::kDim; ++k)
          if (sgn(c(i, j, k)) != 0) out.emplace_back(i, j, k, c(i, j, k));
    return out;
  }

 private:
  // Ambient positions of the labels 0,1,2,3,1',2',3'.
  static constexpr int x0 = 0, x1 = 1, x2 = 2, x3 = 3, y1 = 4, y2 = 5, y3 = 6;

  Matrix<Rational> gen(int i, int j) const {
    Matrix<Rational> m(so7::kAmbient, so7::kAmbient);
    m(j, i) = Rational(conv_.generator_sign);
    m(i, j) = Rational(-conv_.generator_sign);
    return m;
  }

  void build_basis() {
    basis_.clear();
    // su(3): real rotations, symmetric imaginary parts, traceless diagonal.
    basis_.push_back(gen(x1, x2) + gen(y1, y2));
    basis_.push_back(gen(x1, x3) + gen(y1, y3));
    basis_.push_back(gen(x2, x3) + gen(y2, y3));
    basis_.push_back(gen(x1, y2) + gen(x2, y1));
    basis_.push_back(gen(x1, y3) + gen(x3, y1));
    basis_.push_back(gen(x2, y3) + gen(x3, y2));
    basis_.push_back(gen(x1, y1) - gen(x2, y2));
    basis_.push_back(gen(x2, y2) - gen(x3, y3));
    // E = 11' + 22' + 33'
    basis_.push_back(gen(x1, y1) + gen(x2, y2) + gen(x3, y3));
    // A = 01, B = 02, C = 03, A' = 01', B' = 02', C' = 03'
    basis_.push_back(gen(x0, x1));
    basis_.push_back(gen(x0, x2));
    basis_.push_back(gen(x0, x3));
    basis_.push_back(gen(x0, y1));
    basis_.push_back(gen(x0, y2));
    basis_.push_back(gen(x0, y3));
    // P = 23 - 2'3', Q = 31 - 3'1', R = 12 - 1'2'
    basis_.push_back(gen(x2, x3) - gen(y2, y3));
    basis_.push_back(gen(x3, x1) - gen(y3, y1));
    basis_.push_back(gen(x1, x2) - gen(y1, y2));
    // P' = 23' - 32', Q' = 31' - 13', R' = 12' - 21'
    basis_.push_back(gen(x2, y3) - gen(x3, y2));
    basis_.push_back(gen(x3, y1) - gen(x1, y3));
    basis_.push_back(gen(x1, y2) - gen(x2, y1));

    Matrix<Rational> to_upper(so7::kDim, so7::kDim);
    for (int b = 0; b < so7::kDim; ++b) {
      int row = 0;
      for (int i = 0; i < so7::kAmbient; ++i)
        for (int j = i + 1; j < so7::kAmbient; ++j) to_upper(row++, b) = basis_[b](i, j);
    }
    to_coords_ = inverse(to_upper);
  }

  void build_constants() {
    c_.assign(so7::kDim * so7::kDim * so7::kDim, Rational(0));
    for (int i = 0; i < so7::kDim; ++i)
      for (int j = 0; j < so7::kDim; ++j) {
        const auto coords = coordinates(matrix_bracket(basis_[i], basis_[j]));
        for (int k = 0; k < so7::kDim; ++k) c_[(i * so7::kDim + j) * so7::kDim + k] = coords[k];
      }
  }

  So7Convention conv_;
  std::vector<Matrix<Rational>> basis_;
  Matrix<Rational> to_coords_;
  std::vector<Rational> c_;
};

/// Which reductive split an invariant form lives on: M = SO(7)/U(3) with
/// tangent space m, or N = SO(7)/SU(3) with tangent space n = m + RE.
enum class HomSpace { M, N };

/// Scalar-typed view of the bracket restricted to m (and n), with the
/// isotropy representation of u(3) on m.
template <class S> class ReductiveSplit {
 public:
  explicit ReductiveSplit(const So7Data& data) : data_(&data) {
    const int d = so7::kDim;
    c_.resize(static_cast<std::size_t>(d) * d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) c_[(i * d + j) * d + k] = scalar_from<S>(data.c(i, j, k));
  }

  const So7Data& data() const { return *data_; }

  const S& c(int i, int j, int k) const { return c_[(i * so7::kDim + j) * so7::kDim + k]; }

  /// m-component of [X_a, X_b] for local m indices.
  std::vector<S> bracket_m(int a, int b) const {
    std::vector<S> out(so7::kM);
    for (int k = 0; k < so7::kM; ++k) out[k] = c(so7::kFirstM + a, so7::kFirstM + b, so7::kFirstM + k);
    return out;
  }

  /// u(3)-component of [X_a, X_b] in the basis (su(3), E).
  std::vector<S> bracket_h(int a, int b) const {
    std::vector<S> out(so7::kU3);
    for (int k = 0; k < so7::kU3; ++k) out[k] = c(so7::kFirstM + a, so7::kFirstM + b, k);
    return out;
  }

  /// ad(h)|_m for h given in u(3) coordinates (su(3) basis, E).
  Matrix<S> ad_on_m(const std::vector<S>& h) const {
    Matrix<S> out(so7::kM, so7::kM);
    for (int i = 0; i < so7::kU3; ++i) {
      if (is_zero(h[i], Tolerance{0.0})) continue;
      for (int b = 0; b < so7::kM; ++b)
        for (int a = 0; a < so7::kM; ++a) out(a, b) += h[i] * c(i, so7::kFirstM + b, so7::kFirstM + a);
    }
    return out;
  }

  Matrix<S> ad_basis(int u3_index) const {
    std::vector<S> h(so7::kU3, S(0));
    h[u3_index] = S(1);
    return ad_on_m(h);
  }

  /// d of a left-invariant dual basis one-form of the chosen space,
  /// restricted to that space: de^k(X_i, X_j) = -e^k([X_i, X_j]).
  AltForm<S> d_basis(HomSpace space, int k) const {
    const int n = space == HomSpace::M ? so7::kM : so7::kN;
    AltForm<S> out(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const S& v = c(global(space, i), global(space, j), global(space, k));
        if (!is_zero(v, Tolerance{0.0})) out.set((Mask(1) << i) | (Mask(1) << j), -v);
      }
    return out;
  }

  static int global(HomSpace space, int local) {
    if (space == HomSpace::N && local == so7::kE_N) return so7::kIndexE;
    return so7::kFirstM + local;
  }

 private:
  const So7Data* data_;
  std::vector<S> c_;
};

/// Exterior derivative of an invariant form at the base point, computed as the
/// antiderivation extending d e^k = -sum_{i<j} c_{ij}^k e^i ^ e^j on the
/// chosen space.
template <class S> AltForm<S> invariant_d(const ReductiveSplit<S>& split, const AltForm<S>& form, HomSpace space) {
  const int n = space == HomSpace::M ? so7::kM : so7::kN;
  if (form.dim() != n) throw DomainError("form is not expressed on the chosen tangent space");
  std::vector<AltForm<S>> d1;
  for (int k = 0; k < n; ++k) d1.push_back(split.d_basis(space, k));
  AltForm<S> out(n, std::min(form.degree() + 1, n));
  if (form.degree() + 1 > n) return out;
  for (const auto& [mask, coef] : form.terms()) {
    const auto idx = mask_indices(mask);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      Mask left = 0, right = 0;
      for (std::size_t t = 0; t < s; ++t) left |= Mask(1) << idx[t];
      for (std::size_t t = s + 1; t < idx.size(); ++t) right |= Mask(1) << idx[t];
      AltForm<S> lf(n, static_cast<int>(s)), rf(n, static_cast<int>(idx.size() - s - 1));
      lf.set(left, S(1));
      rf.set(right, S(1));
      auto term = wedge(wedge(lf, d1[idx[s]]), rf) * coef;
      if (s % 2) term *= S(-1);
      out += term;
    }
  }
  return out;
}

/// Restriction of a form on n to m: drop every term containing e.
template <class S> AltForm<S> restrict_to_m(const AltForm<S>& form_on_n) {
  if (form_on_n.dim() != so7::kN) throw DomainError("expected a form on n");
  AltForm<S> out(so7::kM, form_on_n.degree());
  for (const auto& [mask, c] : form_on_n.terms())
    if (!(mask & (Mask(1) << so7::kE_N))) out.set(mask, c);
  return out;
}

/// Extension of a form on m to n (no e terms).
template <class S> AltForm<S> extend_to_n(const AltForm<S>& form_on_m) {
  if (form_on_m.dim() != so7::kM) throw DomainError("expected a form on m");
  AltForm<S> out(so7::kN, form_on_m.degree());
  for (const auto& [mask, c] : form_on_m.terms()) out.set(mask, c);
  return out;
}

/// Dual basis one-form on m by local index.
template <class S> AltForm<S> dual(int index) { return AltForm<S>::basis(so7::kM, index); }

/// The structure-equation table: d_M of the twelve dual one-forms, as printed
/// for a, a', p, p' together with their cyclic images.
template <class S> std::vector<std::pair<std::string, AltForm<S>>> expected_structure_table() {
  using namespace so7;
  auto m2 = [](int i, int j) { return AltForm<S>::monomial(kM, {i, j}); };
  const S half = S(1) / S(2);
  std::vector<std::pair<std::string, AltForm<S>>> base{
      {"a", -m2(B, R) + m2(C, Q) - m2(Bp, Rp) + m2(Cp, Qp)},
      {"a'", -m2(B, Rp) + m2(C, Qp) + m2(Bp, R) - m2(Cp, Q)},
      {"p", (m2(B, C) - m2(Bp, Cp)) * S(-half)},
      {"p'", (m2(B, Cp) + m2(Bp, C)) * S(-half)},
  };
  const auto perm = cyclic_permutation();
  std::vector<std::pair<std::string, AltForm<S>>> out;
  const std::array<std::array<const char*, 4>, 3> names{
      {{"a", "a'", "p", "p'"}, {"b", "b'", "q", "q'"}, {"c", "c'", "r", "r'"}}};
  for (int shift = 0; shift < 3; ++shift)
    for (int e = 0; e < 4; ++e) {
      auto f = base[e].second;
      for (int s = 0; s < shift; ++s) f = relabel(f, perm);
      out.emplace_back(names[shift][e], f);
    }
  return out;
}

inline int dual_index(const std::string& name) {
  for (int i = 0; i < so7::kM; ++i)
    if (name == so7::kDualLabels[i]) return i;
  throw DomainError("unknown dual basis label " + name);
}

struct TableEntry {
  std::string form;
  bool passed = false;
  std::string diff;
};

template <class S> std::string describe_form(const AltForm<S>& f, bool on_n = false) {
  if (f.terms().empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, c] : f.terms()) {
    os << (first ? "" : " + ") << to_string(c) << "*";
    bool firstf = true;
    for (int i : mask_indices(mask)) {
      os << (firstf ? "" : "^") << (on_n && i == so7::kE_N ? "e" : so7::kDualLabels[i]);
      firstf = false;
    }
    first = false;
  }
  return os.str();
}

/// Coefficient-by-coefficient comparison of all twelve d_M one-form
/// derivatives against the table.
inline std::vector<TableEntry> verify_structure_table(const So7Data& data) {
  ReductiveSplit<Rational> split(data);
  std::vector<TableEntry> out;
  for (const auto& [name, expected] : expected_structure_table<Rational>()) {
    const auto got = invariant_d(split, dual<Rational>(dual_index(name)), HomSpace::M);
    TableEntry e{name, got == expected, {}};
    if (!e.passed) e.diff = "got " + describe_form(got) + ", expected " + describe_form(expected);
    out.push_back(std::move(e));
  }
  return out;
}

inline bool structure_table_holds(const So7Data& data) {
  for (const auto& e : verify_structure_table(data))
    if (!e.passed) return false;
  return true;
}

/// Builds so(7), choosing the unique sign convention for which the d_M table
/// holds and E maps e_1 to e_1'.
inline So7Data build_so7() {
  std::vector<So7Data> passing;
  for (int gs : {1, -1})
    for (int bs : {1, -1}) {
      auto d = So7Data::with_convention({gs, bs});
      // i1 = 1': E e_1 = e_1'.
      const auto& e = d.element(so7::kIndexE);
      if (e(4, 1) != 1) continue;
      if (structure_table_holds(d)) passing.push_back(std::move(d));
    }
  if (passing.size() != 1) throw DomainError("no unique sign convention reproduces the structure equations");
  return passing.front();
}

/// Shared immutable instance.
inline const So7Data& so7_data() {
  static const So7Data data = build_so7();
  return data;
}

/// Jacobi identity on all basis triples; returns the number of failing triples.
inline int jacobi_failures(const So7Data& data) {
  int failures = 0;
  const int d = so7::kDim;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        // sum_l c_ij^l c_lk^m + c_jk^l c_li^m + c_ki^l c_lj^m
        for (int m = 0; m < d; ++m) {
          Rational v(0);
          for (int l = 0; l < d; ++l) {
            v += data.c(i, j, l) * data.c(l, k, m);
            v += data.c(j, k, l) * data.c(l, i, m);
            v += data.c(k, i, l) * data.c(l, j, m);
          }
          if (sgn(v) != 0) {
            ++failures;
            break;
          }
        }
      }
  return failures;
}

/// ad(h)|_m for an element of so(7) given in 21-coordinates; throws if the
/// element has an m-component.
template <class S> Matrix<S> isotropy_action(const ReductiveSplit<S>& split, const std::vector<S>& element) {
  if (element.size() != static_cast<std::size_t>(so7::kDim)) throw DomainError("expected 21 coordinates");
  for (int k = so7::kFirstM; k < so7::kDim; ++k)
    if (!is_zero(element[k], Tolerance{0.0})) throw DomainError("element is not in u(3)");
  return split.ad_on_m(std::vector<S>(element.begin(), element.begin() + so7::kU3));
}

enum class Subalgebra { U3, SU3 };

template <class S> struct InvariantFormSpace {
  int degree = 0;
  Subalgebra subalgebra = Subalgebra::U3;
  std::vector<AltForm<S>> basis;
  std::size_t dimension() const { return basis.size(); }
};

template <class S> std::vector<Matrix<S>> subalgebra_actions(const ReductiveSplit<S>& split, Subalgebra sub) {
  std::vector<Matrix<S>> out;
  if (sub == Subalgebra::U3) out.push_back(split.ad_basis(so7::kIndexE));
  for (int i = 0; i < so7::kSu3; ++i) out.push_back(split.ad_basis(i));
  return out;
}

/// Forms in Lambda^k m* annihilated by every generator of the subalgebra.
template <class S>
InvariantFormSpace<S> invariant_subspace(const ReductiveSplit<S>& split, int degree, Subalgebra sub,
                                         Tolerance tol = {}) {
  if (degree < 1 || degree > 6) throw DomainError("invariant forms computed for degrees 1..6");
  const auto masks = AltForm<S>::masks_of_degree(so7::kM, degree);
  JointKernel<S> kernel(masks.size(), tol);
  for (const auto& action : subalgebra_actions(split, sub))
    kernel.constrain([&](const std::vector<S>& v) {
      return derive(action, AltForm<S>::from_dense(so7::kM, degree, v)).dense();
    });
  InvariantFormSpace<S> out{degree, sub, {}};
  for (const auto& v : kernel.basis()) out.basis.push_back(AltForm<S>::from_dense(so7::kM, degree, v));
  return out;
}

/// True when `form` lies in the span of the space's basis.
template <class S> bool in_span(const std::vector<AltForm<S>>& basis, const AltForm<S>& form, Tolerance tol = {}) {
  std::vector<std::vector<S>> rows;
  for (const auto& b : basis) rows.push_back(b.dense());
  const auto r0 = rank(rows, tol);
  rows.push_back(form.dense());
  return rank(rows, tol) == r0;
}

}  // namespace twistor
