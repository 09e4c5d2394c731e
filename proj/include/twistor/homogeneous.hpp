#pragma once

#include "exterior.hpp"
#include "lie.hpp"
#include "linalg.hpp"

#include <cmath>
#include <vector>

namespace twistor {

/// g = sum_cyc lambda (a^2 + a'^2) + mu (p^2 + p'^2) on m.
template <class S> class InvariantMetric {
 public:
  InvariantMetric(S lambda, S mu) : lambda_(std::move(lambda)), mu_(std::move(mu)) {
    if (to_double(lambda_) <= 0 || to_double(mu_) <= 0 || is_zero(lambda_, Tolerance{0.0}) ||
        is_zero(mu_, Tolerance{0.0}))
      throw DomainError("metric parameters must be positive");
    std::vector<S> diag(so7::kM);
    for (int i = 0; i < so7::kM; ++i) diag[i] = i < so7::P ? lambda_ : mu_;
    metric_ = Metric<S>::diagonal(diag);
  }

  /// Volume-normalized member of the family: mu = 1/lambda.
  static InvariantMetric normalized(const S& lambda) {
    if (to_double(lambda) <= 0 || is_zero(lambda, Tolerance{0.0})) throw DomainError("lambda must be positive");
    return InvariantMetric(lambda, S(1) / lambda);
  }

  const S& lambda() const { return lambda_; }
  const S& mu() const { return mu_; }
  bool is_normalized(Tolerance tol = {}) const { return is_zero(S(lambda_ * mu_ - S(1)), tol); }
  const Metric<S>& metric() const { return metric_; }
  const Matrix<S>& matrix() const { return metric_.matrix(); }

 private:
  S lambda_, mu_;
  Metric<S> metric_;
};

/// Levi-Civita connection at the base point as a linear map m -> End(m):
/// nabla_X Y = Lambda(X) Y for invariant vector fields.
template <class S> class NomizuMap {
 public:
  explicit NomizuMap(std::vector<Matrix<S>> maps) : maps_(std::move(maps)) {}
  const Matrix<S>& operator()(int basis_index) const { return maps_[basis_index]; }

  /// Lambda(v) for a general vector.
  Matrix<S> at(const std::vector<S>& v) const {
    Matrix<S> out(so7::kM, so7::kM);
    for (int i = 0; i < so7::kM; ++i)
      if (!is_zero(v[i], Tolerance{0.0})) out += maps_[i] * v[i];
    return out;
  }

  int dim() const { return static_cast<int>(maps_.size()); }

 private:
  std::vector<Matrix<S>> maps_;
};

/// Lambda(X) Y = 1/2 [X,Y]_m + U(X,Y) with
/// g(U(X,Y), Z) = 1/2 (g([Z,X]_m, Y) + g(X, [Z,Y]_m)).
template <class S> NomizuMap<S> nomizu(const ReductiveSplit<S>& split, const Metric<S>& g) {
  const int n = so7::kM;
  const auto& gm = g.matrix();
  const auto& ginv = g.inverse_matrix();
  const S half = S(1) / S(2);
  // br[a][b] = [X_a, X_b]_m
  std::vector<std::vector<std::vector<S>>> br(n, std::vector<std::vector<S>>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) br[a][b] = split.bracket_m(a, b);
  auto gvec = [&](const std::vector<S>& x, int y) {
    S v(0);
    for (int i = 0; i < n; ++i)
      if (!is_zero(x[i], Tolerance{0.0})) v += x[i] * gm(i, y);
    return v;
  };
  std::vector<Matrix<S>> maps(n, Matrix<S>(n, n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      // lowered U: u_z = g(U(X,Y), Z)
      std::vector<S> lowered(n);
      for (int z = 0; z < n; ++z) lowered[z] = half * (gvec(br[z][x], y) + gvec(br[z][y], x));
      for (int z = 0; z < n; ++z) {
        S v = half * br[x][y][z];
        for (int w = 0; w < n; ++w)
          if (!is_zero(ginv(z, w), Tolerance{0.0})) v += ginv(z, w) * lowered[w];
        maps[x](z, y) = v;
      }
    }
  return NomizuMap<S>(std::move(maps));
}

/// Number of basis pairs violating Lambda(X)Y - Lambda(Y)X = [X,Y]_m.
template <class S> int torsion_failures(const ReductiveSplit<S>& split, const NomizuMap<S>& nm, Tolerance tol = {}) {
  int fails = 0;
  for (int x = 0; x < so7::kM; ++x)
    for (int y = x + 1; y < so7::kM; ++y) {
      const auto br = split.bracket_m(x, y);
      for (int z = 0; z < so7::kM; ++z)
        if (!is_zero(S(nm(x)(z, y) - nm(y)(z, x) - br[z]), tol)) {
          ++fails;
          break;
        }
    }
  return fails;
}

/// Number of basis vectors X for which Lambda(X) is not g-skew.
template <class S> int metricity_failures(const NomizuMap<S>& nm, const Metric<S>& g, Tolerance tol = {}) {
  int fails = 0;
  for (int x = 0; x < so7::kM; ++x) {
    const auto lowered = g.matrix() * nm(x);
    if (!(lowered + lowered.transpose()).is_zero_matrix(tol)) ++fails;
  }
  return fails;
}

enum class Frame { Invariant, Section };

/// True when the tensor is fixed by every generator of the isotropy algebra
/// that the frame requires (u(3) for invariant, su(3) for section frames).
template <class S> bool frame_compatible(const ReductiveSplit<S>& split, const AltForm<S>& f, Frame frame) {
  for (const auto& d : subalgebra_actions(split, frame == Frame::Invariant ? Subalgebra::U3 : Subalgebra::SU3))
    if (!derive(d, f).is_zero_form(Tolerance{1e-9})) return false;
  return true;
}

template <class S> bool frame_compatible(const ReductiveSplit<S>& split, const Matrix<S>& endo, Frame frame) {
  for (const auto& d : subalgebra_actions(split, frame == Frame::Invariant ? Subalgebra::U3 : Subalgebra::SU3))
    if (!commutator(d, endo).is_zero_matrix(Tolerance{1e-9})) return false;
  return true;
}

/// nabla_{X_i} f for every basis vector X_i of m.
template <class S>
std::vector<AltForm<S>> cov_deriv(const ReductiveSplit<S>& split, const NomizuMap<S>& nm, const AltForm<S>& f,
                                  Frame frame) {
  if (!frame_compatible(split, f, frame)) throw DomainError("form has non-constant components in the declared frame");
  std::vector<AltForm<S>> out;
  for (int x = 0; x < so7::kM; ++x) out.push_back(derive(nm(x), f));
  return out;
}

/// nabla_{X_i} A = [Lambda(X_i), A] for every basis vector X_i.
template <class S>
std::vector<Matrix<S>> cov_deriv(const ReductiveSplit<S>& split, const NomizuMap<S>& nm, const Matrix<S>& endo,
                                 Frame frame) {
  if (!frame_compatible(split, endo, frame))
    throw DomainError("endomorphism has non-constant components in the declared frame");
  std::vector<Matrix<S>> out;
  for (int x = 0; x < so7::kM; ++x) out.push_back(commutator(nm(x), endo));
  return out;
}

/// (nabla_X g)(Y, Z) = -g(Lambda(X)Y, Z) - g(Y, Lambda(X)Z), as matrices.
template <class S> std::vector<Matrix<S>> cov_deriv_metric(const NomizuMap<S>& nm, const Metric<S>& g) {
  std::vector<Matrix<S>> out;
  for (int x = 0; x < so7::kM; ++x) {
    const auto lowered = g.matrix() * nm(x);
    out.push_back(-(lowered + lowered.transpose()));
  }
  return out;
}

/// Alternation sum_i e^i ^ nabla_{X_i} f; equals df for a torsion-free connection.
template <class S> AltForm<S> alternation(const std::vector<AltForm<S>>& derivs) {
  AltForm<S> out(so7::kM, derivs.front().degree() + 1);
  for (int x = 0; x < so7::kM; ++x) out += wedge(dual<S>(x), derivs[x]);
  return out;
}

/// Curvature, Ricci and scalar curvature at the base point.
template <class S> struct CurvatureData {
  // r[x][y] is the endomorphism R(X_x, X_y).
  std::vector<std::vector<Matrix<S>>> r;
  Matrix<S> ricci;
  S scalar{0};

  const S& value(int x, int y, int z, int w) const { return r[x][y](w, z); }
};

/// R(X,Y) = [Lambda(X), Lambda(Y)] - Lambda([X,Y]_m) - ad([X,Y]_h);
/// Ric(X,Y) = tr(V -> R(V,X)Y).
template <class S>
CurvatureData<S> curvature(const ReductiveSplit<S>& split, const NomizuMap<S>& nm, const Metric<S>& g) {
  const int n = so7::kM;
  CurvatureData<S> out;
  out.r.assign(n, std::vector<Matrix<S>>(n, Matrix<S>(n, n)));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      auto rxy = commutator(nm(x), nm(y)) - nm.at(split.bracket_m(x, y)) - split.ad_on_m(split.bracket_h(x, y));
      out.r[y][x] = -rxy;
      out.r[x][y] = std::move(rxy);
    }
  out.ricci = Matrix<S>(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      S v(0);
      for (int u = 0; u < n; ++u) v += out.r[u][x](u, y);
      out.ricci(x, y) = v;
    }
  const auto& ginv = g.inverse_matrix();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (!is_zero(ginv(x, y), Tolerance{0.0})) out.scalar += ginv(x, y) * out.ricci(x, y);
  return out;
}

/// Counts of violated curvature identities: antisymmetry in (X,Y), g-skewness
/// of R(X,Y), first Bianchi, symmetry of Ricci.
struct CurvatureChecks {
  int antisymmetry = 0, skewness = 0, bianchi = 0, ricci_symmetry = 0;
  bool all_pass() const { return antisymmetry + skewness + bianchi + ricci_symmetry == 0; }
};

template <class S> CurvatureChecks check_curvature(const CurvatureData<S>& cd, const Metric<S>& g, Tolerance tol = {}) {
  const int n = so7::kM;
  CurvatureChecks out;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (!(cd.r[x][y] + cd.r[y][x]).is_zero_matrix(tol)) ++out.antisymmetry;
      const auto lowered = g.matrix() * cd.r[x][y];
      if (!(lowered + lowered.transpose()).is_zero_matrix(tol)) ++out.skewness;
      if (!is_zero(S(cd.ricci(x, y) - cd.ricci(y, x)), tol)) ++out.ricci_symmetry;
    }
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      for (int z = y + 1; z < n; ++z)
        for (int w = 0; w < n; ++w)
          if (!is_zero(S(cd.r[x][y](w, z) + cd.r[y][z](w, x) + cd.r[z][x](w, y)), tol)) {
            ++out.bianchi;
            break;
          }
  return out;
}

/// |Ric - (s/n) g|^2 in the metric induced on symmetric bilinear forms.
template <class S> S einstein_deviation_sq(const CurvatureData<S>& cd, const Metric<S>& g) {
  const int n = so7::kM;
  const auto traceless = cd.ricci - g.matrix() * (cd.scalar / S(n));
  const auto mixed = g.inverse_matrix() * traceless;
  return (mixed * mixed).trace();
}

/// Signed indicator for the two-parameter family: Ricci eigenvalue on
/// span{A..C'} minus the one on span{P..R'}. Vanishes exactly at Einstein
/// members.
template <class S> S einstein_indicator(const CurvatureData<S>& cd, const Metric<S>& g) {
  return cd.ricci(so7::A, so7::A) / g.on_basis(so7::A, so7::A) - cd.ricci(so7::P, so7::P) / g.on_basis(so7::P, so7::P);
}

/// Non-negative deviation from the Einstein condition for a normalized metric.
template <class S> double einstein_deviation(const ReductiveSplit<S>& split, const InvariantMetric<S>& g) {
  const auto nm = nomizu(split, g.metric());
  const auto cd = curvature(split, nm, g.metric());
  return std::sqrt(std::max(0.0, to_double(einstein_deviation_sq(cd, g.metric()))));
}

}  // namespace twistor
