#pragma once

#include "exterior.hpp"
#include "homogeneous.hpp"
#include "lie.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace twistor {

enum class Acs { I = 0, J = 1, K = 2 };

inline const char* acs_name(Acs a) {
  switch (a) {
    case Acs::I: return "I";
    case Acs::J: return "J";
    case Acs::K: return "K";
  }
  return "?";
}

/// Cyclic successor pairs: for A the pair (B, C) with ABC cyclic in IJK.
inline std::pair<Acs, Acs> cyclic_pair(Acs a) {
  switch (a) {
    case Acs::I: return {Acs::J, Acs::K};
    case Acs::J: return {Acs::K, Acs::I};
    case Acs::K: return {Acs::I, Acs::J};
  }
  return {Acs::J, Acs::K};
}

inline constexpr std::array<Acs, 3> kAllAcs{Acs::I, Acs::J, Acs::K};

namespace forms {

/// Sum over the cyclic group (a,a',p,p') -> (b,b',q,q') -> (c,c',r,r').
template <class S> AltForm<S> cyclic_sum(const AltForm<S>& f) {
  const auto perm = so7::cyclic_permutation();
  auto once = relabel(f, perm);
  return f + once + relabel(once, perm);
}

template <class S> AltForm<S> mono(std::initializer_list<int> idx, const S& c = S(1)) {
  return AltForm<S>::monomial(so7::kM, idx, c);
}

/// omega_0 = sum_cyc a' ^ a
template <class S> AltForm<S> omega0() {
  using namespace so7;
  return cyclic_sum(mono<S>({Ap, A}));
}

/// omega~_0 = sum_cyc p' ^ p
template <class S> AltForm<S> omega0_tilde() {
  using namespace so7;
  return cyclic_sum(mono<S>({Pp, P}));
}

/// Real and imaginary parts of sum_cyc (p + i p') ^ (a + i a').
template <class S> AltForm<S> omega_j_hat() {
  using namespace so7;
  return cyclic_sum(mono<S>({P, A}) - mono<S>({Pp, Ap}));
}
template <class S> AltForm<S> omega_k_hat() {
  using namespace so7;
  return cyclic_sum(mono<S>({P, Ap}) + mono<S>({Pp, A}));
}

/// Phi = sum_cyc (a^b^r - a'^b'^r + a^b'^r' + a'^b^r')
template <class S> AltForm<S> phi() {
  using namespace so7;
  return cyclic_sum(mono<S>({A, B, R}) - mono<S>({Ap, Bp, R}) + mono<S>({A, Bp, Rp}) + mono<S>({Ap, B, Rp}));
}

/// Psi = sum_cyc (p^q^r - 3 p^q'^r')
template <class S> AltForm<S> psi() {
  using namespace so7;
  return cyclic_sum(mono<S>({P, Q, R}) - mono<S>({P, Qp, Rp}, S(3)));
}

}  // namespace forms

/// One member of the family of invariant almost quaternion-Hermitian
/// structures at the base point, parametrized by lambda with mu = 1/lambda.
template <class S> class AQHStructure {
 public:
  static AQHStructure build(const S& lambda) {
    if (to_double(lambda) <= 0 || is_zero(lambda, Tolerance{0.0})) throw DomainError("lambda must be positive");
    return AQHStructure(lambda);
  }

  const S& lambda() const { return metric_.lambda(); }
  const S& mu() const { return metric_.mu(); }
  const InvariantMetric<S>& invariant_metric() const { return metric_; }
  const Metric<S>& g() const { return metric_.metric(); }

  const Matrix<S>& acs(Acs a) const { return acs_[static_cast<int>(a)]; }
  const AltForm<S>& omega(Acs a) const { return omega_[static_cast<int>(a)]; }
  const AltForm<S>& omega0() const { return omega0_; }
  const AltForm<S>& omega0_tilde() const { return omega0_tilde_; }
  const AltForm<S>& phi() const { return phi_; }
  const AltForm<S>& psi() const { return psi_; }

  /// Tensors built from the local section have constant components only in
  /// the section frame.
  static Frame frame_of(Acs a) { return a == Acs::I ? Frame::Invariant : Frame::Section; }

  /// Magnitude used to scale absolute float tolerances for zero tests.
  double zero_scale() const {
    const double m = std::max({1.0, to_double(lambda()), to_double(mu())});
    return m * m * m;
  }

 private:
  explicit AQHStructure(const S& lambda) : metric_(InvariantMetric<S>::normalized(lambda)) {
    using namespace so7;
    const S l = metric_.lambda(), m = metric_.mu();
    Matrix<S> i(kM, kM), j(kM, kM), k(kM, kM);
    for (int c = 0; c < 3; ++c) {
      const int x = A + c, xp = Ap + c, y = P + c, yp = Pp + c;
      // IA = A', IP = P'
      i(xp, x) = S(1);
      i(x, xp) = S(-1);
      i(yp, y) = S(1);
      i(y, yp) = S(-1);
      // JA = lambda P, JA' = -lambda P', JP = -mu A, JP' = mu A'
      j(y, x) = l;
      j(yp, xp) = -l;
      j(x, y) = -m;
      j(xp, yp) = m;
      // KA = lambda P', KA' = lambda P, KP = -mu A', KP' = -mu A
      k(yp, x) = l;
      k(y, xp) = l;
      k(xp, y) = -m;
      k(x, yp) = -m;
    }
    acs_ = {i, j, k};
    omega0_ = forms::omega0<S>();
    omega0_tilde_ = forms::omega0_tilde<S>();
    omega_ = {omega0_ * l + omega0_tilde_ * m, forms::omega_j_hat<S>(), forms::omega_k_hat<S>()};
    phi_ = forms::phi<S>();
    psi_ = forms::psi<S>();
  }

  InvariantMetric<S> metric_;
  std::array<Matrix<S>, 3> acs_;
  std::array<AltForm<S>, 3> omega_;
  AltForm<S> omega0_, omega0_tilde_, phi_, psi_;
};

/// Violations of the algebraic structure identities; empty when valid.
template <class S> std::vector<std::string> check_structure(const AQHStructure<S>& s, Tolerance tol = {}) {
  std::vector<std::string> problems;
  const auto id = Matrix<S>::identity(so7::kM);
  const auto& I = s.acs(Acs::I);
  const auto& J = s.acs(Acs::J);
  const auto& K = s.acs(Acs::K);
  for (Acs a : kAllAcs)
    if (!(s.acs(a) * s.acs(a) + id).is_zero_matrix(tol)) problems.push_back(std::string(acs_name(a)) + "^2 != -1");
  if (!approx_equal(Matrix<S>(I * J), K, tol)) problems.push_back("IJ != K");
  if (!approx_equal(Matrix<S>(J * I), Matrix<S>(-K), tol)) problems.push_back("JI != -K");
  const auto& g = s.g().matrix();
  for (Acs a : kAllAcs) {
    const auto& m = s.acs(a);
    if (!approx_equal(Matrix<S>(m.transpose() * g * m), g, tol))
      problems.push_back(std::string("g not ") + acs_name(a) + "-Hermitian");
    // omega_A(X, Y) = g(X, AY)
    const auto gm = g * m;
    for (int x = 0; x < so7::kM; ++x)
      for (int y = 0; y < so7::kM; ++y)
        if (!is_zero(S(s.omega(a).on_basis({x, y}) - gm(x, y)), tol)) {
          problems.push_back(std::string("omega_") + acs_name(a) + " != g(., " + acs_name(a) + ".)");
          x = y = so7::kM;
        }
  }
  // omega_J + i omega_K has no (1,1) part for I.
  for (Acs a : {Acs::J, Acs::K})
    if (!hermitian_type_split(s.omega(a), I, tol).mixed.is_zero_form(tol))
      problems.push_back(std::string("omega_") + acs_name(a) + " has a (1,1) part for I");
  return problems;
}

/// Both sides of 20 lambda^3 mu^3 omega_0^3 ^ omega~_0^3 = omega_J^6 on the
/// top-degree monomial.
template <class S> struct NormalizationCheck {
  S omega0_cubed_coeff{0};  // coefficient of omega_0^3 ^ omega~_0^3
  S omega_j_sixth_coeff{0};
  S lhs{0};
  bool holds = false;
};

template <class S> NormalizationCheck<S> check_normalization(const AQHStructure<S>& s, Tolerance tol = {}) {
  const Mask top = (Mask(1) << so7::kM) - 1;
  NormalizationCheck<S> out;
  out.omega0_cubed_coeff = wedge(wedge_power(s.omega0(), 3), wedge_power(s.omega0_tilde(), 3)).coeff(top);
  out.omega_j_sixth_coeff = wedge_power(s.omega(Acs::J), 6).coeff(top);
  const S lm = s.lambda() * s.mu();
  out.lhs = S(20) * lm * lm * lm * out.omega0_cubed_coeff;
  out.holds = is_zero(S(out.lhs - out.omega_j_sixth_coeff), Tolerance{tol.abs * 720});
  return out;
}

/// Exterior derivatives of the three fundamental forms at the base point and
/// their rotations A.d(omega_A).
template <class S> struct DOmegas {
  std::array<AltForm<S>, 3> d;
  std::array<AltForm<S>, 3> rotated;
  const AltForm<S>& of(Acs a) const { return d[static_cast<int>(a)]; }
  const AltForm<S>& rotated_of(Acs a) const { return rotated[static_cast<int>(a)]; }
};

/// d(omega_I) through d_M; d(omega_J), d(omega_K) through d_N on the circle
/// bundle, restricted to m along the section with s*e = 0.
template <class S> DOmegas<S> d_omegas(const ReductiveSplit<S>& split, const AQHStructure<S>& s) {
  DOmegas<S> out;
  out.d[0] = invariant_d(split, s.omega(Acs::I), HomSpace::M);
  for (Acs a : {Acs::J, Acs::K})
    out.d[static_cast<int>(a)] = restrict_to_m(invariant_d(split, extend_to_n(s.omega(a)), HomSpace::N));
  for (Acs a : kAllAcs) out.rotated[static_cast<int>(a)] = acs_action(s.acs(a), out.of(a));
  return out;
}

/// Closed forms: I.d(omega_I) = (mu/2 - 2 lambda) Phi,
/// J.d(omega_J) = 2 lambda Phi - mu^3/2 Psi, K.d(omega_K) = 2 lambda Phi + mu^3/2 Psi.
template <class S> std::array<AltForm<S>, 3> expected_rotated_d(const AQHStructure<S>& s) {
  const S l = s.lambda(), m = s.mu(), half = S(1) / S(2);
  const S m3 = m * m * m;
  return {s.phi() * S(half * m - S(2) * l), s.phi() * S(S(2) * l) - s.psi() * S(half * m3),
          s.phi() * S(S(2) * l) + s.psi() * S(half * m3)};
}

template <class S> struct Betas {
  std::array<AltForm<S>, 3> beta;
  // contraction[a][b] = Lambda_{omega_a} beta_b
  std::array<std::array<AltForm<S>, 3>, 3> contraction;
  const AltForm<S>& of(Acs a) const { return beta[static_cast<int>(a)]; }

  double contractions_max() const {
    double m = 0;
    for (const auto& row : contraction)
      for (const auto& c : row) m = std::max(m, c.max_abs());
    return m;
  }
};

/// beta_A = B.d(omega_B) + C.d(omega_C) over cyclic (A, B, C), and all nine
/// contractions with omega_I, omega_J, omega_K.
template <class S> Betas<S> betas(const AQHStructure<S>& s, const DOmegas<S>& d) {
  Betas<S> out;
  for (Acs a : kAllAcs) {
    auto [b, c] = cyclic_pair(a);
    out.beta[static_cast<int>(a)] = d.rotated_of(b) + d.rotated_of(c);
  }
  for (Acs a : kAllAcs)
    for (Acs b : kAllAcs)
      out.contraction[static_cast<int>(a)][static_cast<int>(b)] = contract2(s.omega(a), out.of(b), s.g());
  return out;
}

/// beta_I = 4 lambda Phi, beta_J = (mu Phi + mu^3 Psi)/2, beta_K = (mu Phi - mu^3 Psi)/2.
template <class S> std::array<AltForm<S>, 3> expected_betas(const AQHStructure<S>& s) {
  const S l = s.lambda(), m = s.mu(), half = S(1) / S(2);
  const S m3 = m * m * m;
  return {s.phi() * S(S(4) * l), (s.phi() * m + s.psi() * m3) * half, (s.phi() * m - s.psi() * m3) * half};
}

/// psi^(3) = (beta_I + beta_J + beta_K)/12.
template <class S> AltForm<S> psi3(const Betas<S>& b) {
  return (b.of(Acs::I) + b.of(Acs::J) + b.of(Acs::K)) * (S(1) / S(12));
}

/// psi^(3)_A = (-beta_A + 2 (3 + L_A) psi^(3)) / 8.
template <class S> AltForm<S> psi3_component(const AQHStructure<S>& s, const Betas<S>& b, Acs a) {
  const auto p = psi3(b);
  return (-b.of(a) + (p * S(3) + slot_sum(s.acs(a), p)) * S(2)) * (S(1) / S(8));
}

/// Everything derived from the Levi-Civita connection that the torsion
/// computations share.
template <class S> struct Derivatives {
  NomizuMap<S> nomizu;
  std::array<std::vector<Matrix<S>>, 3> nabla_acs;     // nabla_{X_x} A
  std::array<std::vector<AltForm<S>>, 3> nabla_omega;  // nabla_{X_x} omega_A
};

template <class S> Derivatives<S> derivatives(const ReductiveSplit<S>& split, const AQHStructure<S>& s) {
  auto nm = nomizu(split, s.g());
  Derivatives<S> out{nm, {}, {}};
  for (Acs a : kAllAcs) {
    out.nabla_acs[static_cast<int>(a)] = cov_deriv(split, nm, s.acs(a), AQHStructure<S>::frame_of(a));
    out.nabla_omega[static_cast<int>(a)] = cov_deriv(split, nm, s.omega(a), AQHStructure<S>::frame_of(a));
  }
  return out;
}

/// Intrinsic torsion xi_X as endomorphisms of m, one per basis vector, with
/// the one-forms lambda_A and the validation outcome.
template <class S> struct IntrinsicTorsion {
  std::vector<Matrix<S>> xi;
  std::array<std::vector<S>, 3> lambda_forms;  // lambda_A(X_x)
  S sp1_scale{1};                              // factor applied to the sum of lambda_A(X) A
  bool skew = false;
  bool preserves_quaternions = false;
  bool orthogonal_to_sp1 = false;
};

template <class S> S trace_pairing(const Matrix<S>& a, const Matrix<S>& b) { return -(a * b).trace(); }

template <class S>
IntrinsicTorsion<S> intrinsic_torsion(const AQHStructure<S>& s, const Derivatives<S>& d, Tolerance tol = {}) {
  const int n = so7::kM;
  IntrinsicTorsion<S> out;
  const S sixth = S(1) / S(6);
  // 6 lambda_A(X) = g(nabla_X omega_B, omega_C) for cyclic (A, B, C).
  for (Acs a : kAllAcs) {
    auto [b, c] = cyclic_pair(a);
    auto& lf = out.lambda_forms[static_cast<int>(a)];
    for (int x = 0; x < n; ++x)
      lf.push_back(form_inner(d.nabla_omega[static_cast<int>(b)][x], s.omega(c), s.g()) * sixth);
  }
  std::vector<Matrix<S>> base(n, Matrix<S>(n, n)), sp1_term(n, Matrix<S>(n, n));
  const S quarter = S(1) / S(4);
  for (int x = 0; x < n; ++x)
    for (Acs a : kAllAcs) {
      base[x] -= s.acs(a) * d.nabla_acs[static_cast<int>(a)][x] * quarter;
      sp1_term[x] += s.acs(a) * out.lambda_forms[static_cast<int>(a)][x];
    }

  // The sp(1) term coefficient is 1/2; if that does not make xi orthogonal to
  // sp(1), solve for the unique coefficient that does.
  auto sp1_residual = [&](const S& factor) {
    double worst = 0;
    for (int x = 0; x < n; ++x) {
      const auto m = base[x] + sp1_term[x] * factor;
      for (Acs a : kAllAcs) worst = std::max(worst, ScalarTraits<S>::abs_value(trace_pairing(m, s.acs(a))));
    }
    return worst;
  };
  S factor = S(1) / S(2);
  if (sp1_residual(factor) > tol.abs * s.zero_scale()) {
    for (int x = 0; x < n; ++x)
      for (Acs a : kAllAcs) {
        const S denom = trace_pairing(sp1_term[x], s.acs(a));
        if (is_zero(denom, Tolerance{0.0})) continue;
        factor = -trace_pairing(base[x], s.acs(a)) / denom;
        x = n;
        break;
      }
  }
  out.sp1_scale = factor;
  for (int x = 0; x < n; ++x) out.xi.push_back(base[x] + sp1_term[x] * factor);

  const Tolerance scaled{tol.abs * s.zero_scale()};
  const auto& g = s.g().matrix();
  out.skew = true;
  for (const auto& m : out.xi) {
    const auto lowered = g * m;
    if (!(lowered + lowered.transpose()).is_zero_matrix(scaled)) out.skew = false;
  }
  out.orthogonal_to_sp1 = sp1_residual(factor) <= scaled.abs;
  // (nabla^LC + xi)_X A lies in span{B, C}.
  out.preserves_quaternions = true;
  for (int x = 0; x < n && out.preserves_quaternions; ++x)
    for (Acs a : kAllAcs) {
      auto [b, c] = cyclic_pair(a);
      auto moved = d.nabla_acs[static_cast<int>(a)][x] + commutator(out.xi[x], s.acs(a));
      const S nb = trace_pairing(s.acs(b), s.acs(b));
      const S cb = trace_pairing(moved, s.acs(b)) / nb;
      const S cc = trace_pairing(moved, s.acs(c)) / nb;
      const auto residual = moved - s.acs(b) * cb - s.acs(c) * cc;
      if (!residual.is_zero_matrix(scaled)) {
        out.preserves_quaternions = false;
        break;
      }
    }
  return out;
}

/// The torsion space Q = m* (x) (sp(3) + sp(1))^perp inside m* (x) so(m, g)
/// and its u(3)-invariant part.
template <class S> class TorsionSpace {
 public:
  TorsionSpace(const ReductiveSplit<S>& split, const AQHStructure<S>& s, Tolerance tol = {})
      : split_(&split), s_(&s), tol_(tol) {
    const int n = so7::kM;
    ginv_ = s.g().inverse_matrix();
    g_ = s.g().matrix();
    // sp(3): g-skew endomorphisms commuting with I, J, K.
    JointKernel<S> sp3(kSkewDim, tol);
    for (Acs a : kAllAcs)
      sp3.constrain([&](const std::vector<S>& v) { return flatten(commutator(from_coords(v), s.acs(a))); });
    for (const auto& v : sp3.basis()) sp3_.push_back(from_coords(v));
    for (Acs a : kAllAcs) sp1_.push_back(s.acs(a));
    actions_ = subalgebra_actions(split, Subalgebra::U3);
    (void)n;
  }

  static constexpr int kSkewDim = so7::kM * (so7::kM - 1) / 2;

  std::size_t sp3_dimension() const { return sp3_.size(); }
  std::size_t sp1_dimension() const { return sp1_.size(); }
  std::size_t complement_dimension() const {
    std::vector<std::vector<S>> rows;
    for (const auto& m : sp3_) rows.push_back(to_coords(m));
    for (const auto& m : sp1_) rows.push_back(to_coords(m));
    return kSkewDim - rank(rows, tol_);
  }

  /// Basis of Q^{u(3)}, each element a list of 12 endomorphisms xi(X_x).
  std::vector<std::vector<Matrix<S>>> invariant_basis() const {
    const int n = so7::kM;
    JointKernel<S> k(static_cast<std::size_t>(n) * kSkewDim, tol_);
    k.constrain([&](const std::vector<S>& v) { return flatten_all(act(actions_[0], unpack(v))); });
    k.constrain([&](const std::vector<S>& v) { return orthogonality(unpack(v)); });
    for (std::size_t h = 1; h < actions_.size(); ++h)
      k.constrain([&](const std::vector<S>& v) { return flatten_all(act(actions_[h], unpack(v))); });
    std::vector<std::vector<Matrix<S>>> out;
    for (const auto& v : k.basis()) out.push_back(unpack(v));
    return out;
  }

  /// Largest violation of u(3)-invariance and of orthogonality to sp(3)+sp(1).
  double membership_defect(const std::vector<Matrix<S>>& xi) const {
    double worst = 0;
    for (const auto& x : orthogonality(xi)) worst = std::max(worst, ScalarTraits<S>::abs_value(x));
    for (const auto& d : actions_)
      for (const auto& m : act(d, xi)) worst = std::max(worst, m.max_abs());
    return worst;
  }

  /// Rank test: does xi lie in the span of the given basis?
  bool in_span(const std::vector<std::vector<Matrix<S>>>& basis, const std::vector<Matrix<S>>& xi,
               Tolerance tol = {}) const {
    std::vector<std::vector<S>> rows;
    for (const auto& b : basis) rows.push_back(pack(b));
    const auto r0 = rank(rows, tol);
    rows.push_back(pack(xi));
    return rank(rows, tol) == r0;
  }

  /// Least-squares residual of xi against the span of the basis, relative to
  /// the size of xi.
  double span_residual(const std::vector<std::vector<Matrix<S>>>& basis, const std::vector<Matrix<S>>& xi) const {
    const std::size_t d = basis.size();
    std::vector<std::vector<double>> b;
    for (const auto& e : basis) {
      std::vector<double> row;
      for (const auto& x : pack(e)) row.push_back(to_double(x));
      b.push_back(std::move(row));
    }
    std::vector<double> target;
    for (const auto& x : pack(xi)) target.push_back(to_double(x));
    Matrix<double> gram(d, d);
    std::vector<double> rhs(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t t = 0; t < target.size(); ++t) gram(i, j) += b[i][t] * b[j][t];
      for (std::size_t t = 0; t < target.size(); ++t) rhs[i] += b[i][t] * target[t];
    }
    const auto coef = inverse(gram, Tolerance{1e-14}).apply(rhs);
    double res = 0, norm = 0;
    for (std::size_t t = 0; t < target.size(); ++t) {
      double v = target[t];
      for (std::size_t i = 0; i < d; ++i) v -= coef[i] * b[i][t];
      res += v * v;
      norm += target[t] * target[t];
    }
    return norm == 0 ? std::sqrt(res) : std::sqrt(res / norm);
  }

 private:
  // Coordinates of a g-skew endomorphism S: the upper entries of g S.
  std::vector<S> to_coords(const Matrix<S>& m) const {
    const auto w = g_ * m;
    std::vector<S> out;
    for (int i = 0; i < so7::kM; ++i)
      for (int j = i + 1; j < so7::kM; ++j) out.push_back(w(i, j));
    return out;
  }
  Matrix<S> from_coords(const std::vector<S>& v) const {
    Matrix<S> w(so7::kM, so7::kM);
    int t = 0;
    for (int i = 0; i < so7::kM; ++i)
      for (int j = i + 1; j < so7::kM; ++j, ++t) {
        w(i, j) = v[t];
        w(j, i) = -v[t];
      }
    return ginv_ * w;
  }
  static std::vector<S> flatten(const Matrix<S>& m) { return m.data(); }
  static std::vector<S> flatten_all(const std::vector<Matrix<S>>& ms) {
    std::vector<S> out;
    for (const auto& m : ms) out.insert(out.end(), m.data().begin(), m.data().end());
    return out;
  }
  std::vector<Matrix<S>> unpack(const std::vector<S>& v) const {
    std::vector<Matrix<S>> out;
    for (int x = 0; x < so7::kM; ++x)
      out.push_back(from_coords(std::vector<S>(v.begin() + x * kSkewDim, v.begin() + (x + 1) * kSkewDim)));
    return out;
  }
  std::vector<S> pack(const std::vector<Matrix<S>>& xi) const {
    std::vector<S> out;
    for (const auto& m : xi) {
      auto c = to_coords(m);
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  }
  // (h.xi)(X_x) = [D, xi(X_x)] - xi(D X_x)
  std::vector<Matrix<S>> act(const Matrix<S>& dm, const std::vector<Matrix<S>>& xi) const {
    std::vector<Matrix<S>> out;
    for (int x = 0; x < so7::kM; ++x) {
      auto m = commutator(dm, xi[x]);
      for (int y = 0; y < so7::kM; ++y)
        if (!is_zero(dm(y, x), Tolerance{0.0})) m -= xi[y] * dm(y, x);
      out.push_back(std::move(m));
    }
    return out;
  }
  std::vector<S> orthogonality(const std::vector<Matrix<S>>& xi) const {
    std::vector<S> out;
    for (const auto& m : xi) {
      for (const auto& t : sp3_) out.push_back(trace_pairing(m, t));
      for (const auto& t : sp1_) out.push_back(trace_pairing(m, t));
    }
    return out;
  }

  const ReductiveSplit<S>* split_;
  const AQHStructure<S>* s_;
  Tolerance tol_;
  Matrix<S> g_, ginv_;
  std::vector<Matrix<S>> sp3_, sp1_, actions_;
};

/// Dimension of Q^{u(3)} computed by exact kernel solve.
template <class S> std::size_t torsion_invariant_dim(const ReductiveSplit<S>& split, const AQHStructure<S>& s) {
  return TorsionSpace<S>(split, s).invariant_basis().size();
}

/// Nijenhuis tensor N_A(X,Y) = (nabla_{AX}A)Y - (nabla_{AY}A)X + A(nabla_Y A)X - A(nabla_X A)Y,
/// stored lowered: value(x, y, z) = g(N(X_x, X_y), X_z).
template <class S> struct Nijenhuis {
  Tensor3<S> lowered{so7::kM};
  bool totally_skew = false;
  AltForm<S> skew_part;  // totally skew part as a 3-form
  double remainder_max = 0;  // size of N minus its skew part
  S norm_sq{0};
};

template <class S>
Nijenhuis<S> nijenhuis(const AQHStructure<S>& s, const Derivatives<S>& d, Acs a, Tolerance tol = {}) {
  const int n = so7::kM;
  const auto& am = s.acs(a);
  const auto& nab = d.nabla_acs[static_cast<int>(a)];
  auto nabla_along = [&](const std::vector<S>& v) {
    Matrix<S> out(n, n);
    for (int i = 0; i < n; ++i)
      if (!is_zero(v[i], Tolerance{0.0})) out += nab[i] * v[i];
    return out;
  };
  auto column = [&](const Matrix<S>& m, int c) {
    std::vector<S> v(n);
    for (int i = 0; i < n; ++i) v[i] = m(i, c);
    return v;
  };
  Nijenhuis<S> out;
  const auto& g = s.g().matrix();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const auto ax = column(am, x), ay = column(am, y);
      const auto t1 = column(nabla_along(ax), y);
      const auto t2 = column(nabla_along(ay), x);
      const auto t3 = am.apply(column(nab[y], x));
      const auto t4 = am.apply(column(nab[x], y));
      std::vector<S> nv(n);
      for (int i = 0; i < n; ++i) nv[i] = t1[i] - t2[i] + t3[i] - t4[i];
      for (int z = 0; z < n; ++z) {
        S v(0);
        for (int i = 0; i < n; ++i)
          if (!is_zero(g(i, z), Tolerance{0.0})) v += nv[i] * g(i, z);
        out.lowered(x, y, z) = v;
      }
    }
  const Tolerance scaled{tol.abs * s.zero_scale()};
  out.totally_skew = out.lowered.is_alternating(scaled);
  out.skew_part = out.lowered.skew_part();
  double rem = 0;
  const auto skew_t = Tensor3<S>::from_form(out.skew_part);
  const auto& ginv = s.g().inverse_matrix();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        rem = std::max(rem, ScalarTraits<S>::abs_value(S(out.lowered(x, y, z) - skew_t(x, y, z))));
        if (x < y) out.norm_sq += out.lowered(x, y, z) * out.lowered(x, y, z) * ginv(x, x) * ginv(y, y) * ginv(z, z);
      }
  out.remainder_max = rem;
  return out;
}

enum class GHClass { W1, W2, W3, W4 };

inline const char* gh_name(GHClass c) {
  switch (c) {
    case GHClass::W1: return "W1";
    case GHClass::W2: return "W2";
    case GHClass::W3: return "W3";
    case GHClass::W4: return "W4";
  }
  return "?";
}

/// Gray-Hervella components of the almost Hermitian structure (g, omega_A, A).
template <class S> struct GrayHervella {
  std::set<GHClass> classes;
  AltForm<S> lee;
  AltForm<S> w3_part;  // primitive (2,1)+(1,2) part of d(omega_A)
  AltForm<S> w1_part;  // (3,0)+(0,3) part of d(omega_A)

  bool has(GHClass c) const { return classes.count(c) > 0; }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (auto c : classes) out.push_back(gh_name(c));
    return out;
  }
};

template <class S>
GrayHervella<S> gray_hervella(const AQHStructure<S>& s, const DOmegas<S>& d, const Nijenhuis<S>& nij, Acs a,
                              Tolerance tol = {}) {
  const Tolerance scaled{tol.abs * s.zero_scale()};
  GrayHervella<S> out;
  const auto& dw = d.of(a);
  const auto& w = s.omega(a);
  out.lee = lee_form(w, dw, s.g());
  const auto split = hermitian_type_split(dw, s.acs(a), scaled);
  out.w1_part = split.pure;
  out.w3_part = split.mixed - wedge(w, out.lee);
  if (!nij.skew_part.is_zero_form(scaled)) out.classes.insert(GHClass::W1);
  if (nij.remainder_max > scaled.abs) out.classes.insert(GHClass::W2);
  if (!out.w3_part.is_zero_form(scaled)) out.classes.insert(GHClass::W3);
  if (!out.lee.is_zero_form(scaled)) out.classes.insert(GHClass::W4);
  return out;
}

/// Least-squares multiple c with form ~ c * reference, and the sine of the
/// angle between the lines they span (0 when parallel or antiparallel).
struct Proportionality {
  double factor = 0;
  double angle = 0;
};

template <class S>
Proportionality proportionality(const AltForm<S>& form, const AltForm<S>& reference, const Metric<S>& g) {
  const double rr = to_double(form_norm_sq(reference, g));
  const double ff = to_double(form_norm_sq(form, g));
  Proportionality p;
  if (rr == 0) return p;
  p.factor = to_double(form_inner(form, reference, g)) / rr;
  if (ff == 0) return p;
  const auto residual = form.template cast<double>() - reference.template cast<double>() * p.factor;
  const double res = form_norm_sq(residual, g.template cast<double>());
  p.angle = std::sqrt(std::max(0.0, res / ff));
  return p;
}

}  // namespace twistor
