#include "oracles.hpp"
#include "so7_oracles.hpp"
#include "twistor/homogeneous.hpp"

#include <gtest/gtest.h>

using namespace twistor;

namespace {

const ReductiveSplit<Rational>& exact_split() {
  static const ReductiveSplit<Rational> split(so7_data());
  return split;
}

const oracle::FrobeniusCoordinates& coords() {
  static const oracle::FrobeniusCoordinates c(so7_data());
  return c;
}

/// [X_a, X_b]_m for all basis pairs, from matrix commutators.
const std::vector<std::vector<std::vector<Rational>>>& basis_brackets() {
  static const auto table = [] {
    std::vector<std::vector<std::vector<Rational>>> t(so7::kM, std::vector<std::vector<Rational>>(so7::kM));
    for (int a = 0; a < so7::kM; ++a)
      for (int b = 0; b < so7::kM; ++b) t[a][b] = oracle::bracket_m(so7_data(), coords(), a, b);
    return t;
  }();
  return table;
}

std::vector<Rational> bracket(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  std::vector<Rational> out(so7::kM, Rational(0));
  for (int a = 0; a < so7::kM; ++a) {
    if (sgn(x[a]) == 0) continue;
    for (int b = 0; b < so7::kM; ++b) {
      if (sgn(y[b]) == 0) continue;
      const Rational xy = x[a] * y[b];
      for (int k = 0; k < so7::kM; ++k) out[k] += xy * basis_brackets()[a][b][k];
    }
  }
  return out;
}

Matrix<Rational> ambient_matrix(const std::vector<Rational>& x) {
  std::vector<Rational> full(so7::kDim, Rational(0));
  for (int a = 0; a < so7::kM; ++a) full[so7::kFirstM + a] = x[a];
  return so7_data().matrix_of(full);
}

/// Ric(X, X) for a G-invariant metric on a quotient of a compact unimodular
/// group: -1/2 sum |[X,X_i]_m|^2 - 1/2 B(X,X) + 1/4 sum <[X_i,X_j]_m, X>^2
/// over an orthonormal frame, with the so(7) Killing form B = 5 tr(XY).
Rational ricci_oracle(const std::vector<Rational>& x, const Metric<Rational>& g) {
  const int n = so7::kM;
  std::vector<std::vector<Rational>> e;
  for (int i = 0; i < n; ++i) e.push_back(oracle::unit(n, i));
  Rational first = 0, third = 0;
  for (int i = 0; i < n; ++i) {
    const auto b = bracket(x, e[i]);
    first += g(b, b) / g.on_basis(i, i);
    for (int j = 0; j < n; ++j) {
      const Rational p = g(bracket(e[i], e[j]), x);
      third += p * p / (g.on_basis(i, i) * g.on_basis(j, j));
    }
  }
  const auto xm = ambient_matrix(x);
  const Rational killing = 5 * (xm * xm).trace();
  return -first / 2 - killing / 2 + third / 4;
}

Rational quadratic(const Matrix<Rational>& m, const std::vector<Rational>& v) {
  Rational s = 0;
  const auto mv = m.apply(v);
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * mv[i];
  return s;
}

struct MetricCase {
  Rational lambda, mu;
};

class MetricFamily : public ::testing::TestWithParam<MetricCase> {};

}  // namespace

TEST(InvariantMetric, RejectsNonPositiveParameters) {
  EXPECT_THROW(InvariantMetric<Rational>(Rational(0), Rational(1)), DomainError);
  EXPECT_THROW(InvariantMetric<Rational>(Rational(1), Rational(-1)), DomainError);
  EXPECT_THROW(InvariantMetric<double>::normalized(-0.5), DomainError);
  EXPECT_TRUE(InvariantMetric<Rational>::normalized(Rational(3, 7)).is_normalized());
  EXPECT_FALSE(InvariantMetric<Rational>(Rational(2), Rational(3)).is_normalized());
}

TEST_P(MetricFamily, NomizuMapMatchesKoszulFormula) {
  const auto [l, m] = GetParam();
  const InvariantMetric<Rational> gm(l, m);
  const auto& g = gm.metric();
  const auto nm = nomizu(exact_split(), g);
  const int n = so7::kM;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const auto ex = oracle::unit(n, x), ey = oracle::unit(n, y), ez = oracle::unit(n, z);
        const Rational want = (g(bracket(ex, ey), ez) - g(bracket(ey, ez), ex) + g(bracket(ez, ex), ey)) / 2;
        ASSERT_EQ(g(oracle::column(nm(x), y), ez), want) << x << " " << y << " " << z;
      }
  EXPECT_EQ(torsion_failures(exact_split(), nm), 0);
  EXPECT_EQ(metricity_failures(nm, g), 0);
}

TEST_P(MetricFamily, RicciMatchesHomogeneousFormula) {
  const auto [l, m] = GetParam();
  const InvariantMetric<Rational> gm(l, m);
  const auto cd = curvature(exact_split(), nomizu(exact_split(), gm.metric()), gm.metric());
  const int n = so7::kM;
  for (int i = 0; i < n; ++i) {
    const auto e = oracle::unit(n, i);
    EXPECT_EQ(cd.ricci(i, i), ricci_oracle(e, gm.metric())) << so7::kMLabels[i];
  }
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const auto v = oracle::random_vector(rng, n);
    EXPECT_EQ(quadratic(cd.ricci, v), ricci_oracle(v, gm.metric()));
  }
}

TEST_P(MetricFamily, CurvatureIdentitiesHold) {
  const auto [l, m] = GetParam();
  const InvariantMetric<Rational> gm(l, m);
  const auto cd = curvature(exact_split(), nomizu(exact_split(), gm.metric()), gm.metric());
  const auto checks = check_curvature(cd, gm.metric());
  EXPECT_TRUE(checks.all_pass()) << checks.antisymmetry << " " << checks.skewness << " " << checks.bianchi << " "
                                 << checks.ricci_symmetry;
}

INSTANTIATE_TEST_SUITE_P(Parameters, MetricFamily,
                         ::testing::Values(MetricCase{Rational(1), Rational(1)}, MetricCase{Rational(1, 2), Rational(2)},
                                           MetricCase{Rational(2), Rational(3)},
                                           MetricCase{Rational(5, 3), Rational(3, 5)}));

TEST(Einstein, HalfIsEinsteinAndOneIsNot) {
  const auto half = InvariantMetric<Rational>::normalized(Rational(1, 2));
  const auto cd = curvature(exact_split(), nomizu(exact_split(), half.metric()), half.metric());
  EXPECT_EQ(einstein_deviation_sq(cd, half.metric()), 0);
  EXPECT_EQ(einstein_indicator(cd, half.metric()), 0);
  EXPECT_GT(einstein_deviation(exact_split(), InvariantMetric<Rational>::normalized(Rational(1))), 0.1);
}

TEST(Einstein, SecondEinsteinMetricInFloat) {
  const ReductiveSplit<double> split(so7_data());
  EXPECT_LT(einstein_deviation(split, InvariantMetric<double>::normalized(std::sqrt(3.0 / 8.0))), 1e-9);
  EXPECT_GT(einstein_deviation(split, InvariantMetric<double>::normalized(0.55)), 1e-3);
}

TEST(Einstein, IndicatorChangesSignBetweenTheEinsteinMetrics) {
  auto indicator = [](const Rational& l) {
    const auto g = InvariantMetric<Rational>::normalized(l);
    const auto cd = curvature(exact_split(), nomizu(exact_split(), g.metric()), g.metric());
    return sgn(einstein_indicator(cd, g.metric()));
  };
  EXPECT_NE(indicator(Rational(2, 5)), indicator(Rational(11, 20)));
  EXPECT_NE(indicator(Rational(11, 20)), indicator(Rational(7, 10)));
}

TEST(CovariantDerivative, AlternationEqualsExteriorDerivativeOfInvariantForms) {
  const auto g = InvariantMetric<Rational>::normalized(Rational(2, 3));
  const auto nm = nomizu(exact_split(), g.metric());
  for (int k : {2, 3}) {
    for (const auto& f : invariant_subspace(exact_split(), k, Subalgebra::U3).basis) {
      const auto derivs = cov_deriv(exact_split(), nm, f, Frame::Invariant);
      EXPECT_EQ(alternation(derivs), invariant_d(exact_split(), f, HomSpace::M)) << "degree " << k;
    }
  }
}

TEST(CovariantDerivative, MetricIsParallel) {
  const auto g = InvariantMetric<Rational>::normalized(Rational(3, 4));
  for (const auto& m : cov_deriv_metric(nomizu(exact_split(), g.metric()), g.metric()))
    EXPECT_TRUE(m.is_zero_matrix());
}

TEST(CovariantDerivative, RejectsFormsNotFixedByTheFrameAlgebra) {
  const auto g = InvariantMetric<Rational>::normalized(Rational(1));
  const auto nm = nomizu(exact_split(), g.metric());
  const auto stray = AltForm<Rational>::monomial(so7::kM, {so7::A, so7::B});
  EXPECT_THROW(cov_deriv(exact_split(), nm, stray, Frame::Invariant), DomainError);
  EXPECT_THROW(cov_deriv(exact_split(), nm, stray, Frame::Section), DomainError);
  Matrix<Rational> endo(so7::kM, so7::kM);
  endo(so7::A, so7::B) = 1;
  EXPECT_THROW(cov_deriv(exact_split(), nm, endo, Frame::Invariant), DomainError);
}
