#include "oracles.hpp"
#include "twistor/exterior.hpp"

#include <gtest/gtest.h>

using namespace twistor;
using oracle::random_form;
using oracle::random_vector;

namespace {

std::vector<std::vector<Rational>> random_vectors(std::mt19937_64& rng, int dim, int count) {
  std::vector<std::vector<Rational>> vs;
  for (int i = 0; i < count; ++i) vs.push_back(random_vector(rng, dim));
  return vs;
}

/// Standard complex structure on R^{2n}: e_i -> e_{i+n}, e_{i+n} -> -e_i.
Matrix<Rational> standard_acs(int n) {
  Matrix<Rational> j(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j(i + n, i) = 1;
    j(i, i + n) = -1;
  }
  return j;
}

/// The Hermitian form w(X, Y) = g(X, JY) for a diagonal metric with equal
/// weights on e_i and e_{i+n}.
AltForm<Rational> hermitian_form(const std::vector<Rational>& weights) {
  const int n = static_cast<int>(weights.size());
  AltForm<Rational> w(2 * n, 2);
  for (int i = 0; i < n; ++i) w += AltForm<Rational>::monomial(2 * n, {i + n, i}, weights[i]);
  return w;
}

Metric<Rational> doubled_metric(const std::vector<Rational>& weights) {
  std::vector<Rational> d(weights);
  d.insert(d.end(), weights.begin(), weights.end());
  return Metric<Rational>::diagonal(d);
}

}  // namespace

TEST(AltForm, MonomialSignFollowsPermutationParity) {
  EXPECT_EQ(AltForm<Rational>::monomial(4, {2, 0, 1}).coeff(0b0111), Rational(1));
  EXPECT_EQ(AltForm<Rational>::monomial(4, {1, 0}).coeff(0b0011), Rational(-1));
  EXPECT_TRUE(AltForm<Rational>::monomial(4, {1, 1}).is_zero_form());
}

TEST(AltForm, EvaluateAgreesWithPermutationSum) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_form(rng, 6, 3);
    const auto vs = random_vectors(rng, 6, 3);
    EXPECT_EQ(f.evaluate(vs), oracle::evaluate(f, vs));
  }
}

TEST(AltForm, RejectsBadShapes) {
  EXPECT_THROW(AltForm<Rational>(4, 5), StructuralError);
  EXPECT_THROW(AltForm<Rational>(40, 1), StructuralError);
  AltForm<Rational> a(4, 1), b(5, 1), c(4, 2);
  EXPECT_THROW(a + b, StructuralError);
  EXPECT_THROW(a + c, StructuralError);
  EXPECT_THROW(a.on_basis({0, 1}), StructuralError);
}

TEST(Wedge, MatchesShuffleDefinition) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 1 + trial % 3, q = 1 + (trial / 3) % 2;
    const auto a = random_form(rng, 6, p), b = random_form(rng, 6, q);
    const auto vs = random_vectors(rng, 6, p + q);
    EXPECT_EQ(wedge(a, b).evaluate(vs), oracle::wedge_value(a, b, vs)) << "p=" << p << " q=" << q;
  }
}

TEST(Wedge, GradedCommutativityAndAssociativity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_form(rng, 7, 2), b = random_form(rng, 7, 3), c = random_form(rng, 7, 1);
    EXPECT_EQ(wedge(a, b), wedge(b, a));
    EXPECT_EQ(wedge(b, c), wedge(c, b) * Rational(-1));
    EXPECT_EQ(wedge(wedge(a, b), c), wedge(a, wedge(b, c)));
    EXPECT_TRUE(wedge(c, c).is_zero_form());
  }
}

TEST(WedgePower, TopPowerIsFactorialTimesPfaffian) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto w = random_form(rng, 6, 2, 0.8);
    const Mask top = (Mask(1) << 6) - 1;
    EXPECT_EQ(wedge_power(w, 3).coeff(top), Rational(6 * oracle::pfaffian(oracle::skew_matrix(w), {0, 1, 2, 3, 4, 5})));
  }
}

TEST(Interior, IsEvaluationInTheFirstSlot) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_form(rng, 6, 3);
    const auto v = random_vector(rng, 6);
    const auto vs = random_vectors(rng, 6, 2);
    EXPECT_EQ(interior(v, f).evaluate(vs), oracle::evaluate(f, {v, vs[0], vs[1]}));
  }
}

TEST(Interior, IsAnAntiderivation) {
  std::mt19937_64 rng(6);
  const auto a = random_form(rng, 6, 2), b = random_form(rng, 6, 2);
  const auto v = random_vector(rng, 6);
  EXPECT_EQ(interior(v, wedge(a, b)), wedge(interior(v, a), b) + wedge(a, interior(v, b)));
}

TEST(Pullback, IsPrecompositionByTheMap) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_form(rng, 5, 3);
    const auto a = oracle::random_matrix(rng, 5);
    const auto vs = random_vectors(rng, 5, 3);
    std::vector<std::vector<Rational>> mapped;
    for (const auto& v : vs) mapped.push_back(a.apply(v));
    EXPECT_EQ(pullback(a, f).evaluate(vs), oracle::evaluate(f, mapped));
  }
}

TEST(Derive, IsMinusSumOverSlots) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_form(rng, 6, 3);
    const auto d = oracle::random_matrix(rng, 6);
    const auto vs = random_vectors(rng, 6, 3);
    Rational want = 0;
    for (int slot = 0; slot < 3; ++slot) {
      auto moved = vs;
      moved[slot] = d.apply(vs[slot]);
      want -= oracle::evaluate(f, moved);
    }
    EXPECT_EQ(derive(d, f).evaluate(vs), want);
  }
}

TEST(Derive, IsADerivationOfTheWedgeProduct) {
  std::mt19937_64 rng(9);
  const auto a = random_form(rng, 6, 1), b = random_form(rng, 6, 2);
  const auto d = oracle::random_matrix(rng, 6);
  EXPECT_EQ(derive(d, wedge(a, b)), wedge(derive(d, a), b) + wedge(a, derive(d, b)));
}

TEST(Relabel, MatchesPullbackByPermutationMatrix) {
  std::mt19937_64 rng(10);
  const std::vector<int> perm{2, 0, 1, 4, 5, 3};
  Matrix<Rational> p(6, 6);  // e^i o P = e^{perm^-1(i)}
  for (int i = 0; i < 6; ++i) p(perm[i], i) = 1;
  const auto f = random_form(rng, 6, 3);
  EXPECT_EQ(relabel(f, perm), pullback(p.transpose(), f));
}

TEST(AcsAction, SignDependsOnDegree) {
  const auto j = standard_acs(2);
  const auto e0 = AltForm<Rational>::basis(4, 0);
  // (J.e^0)(X) = -e^0(JX): J e_2 = -e_0, so J.e^0 = e^2.
  EXPECT_EQ(acs_action(j, e0), AltForm<Rational>::basis(4, 2));
  const auto w = AltForm<Rational>::monomial(4, {0, 2});
  EXPECT_EQ(acs_action(j, w), w);
}

TEST(Tensor3, FromFormIsAlternatingAndRoundTrips) {
  std::mt19937_64 rng(11);
  const auto f = random_form(rng, 5, 3);
  const auto t = Tensor3<Rational>::from_form(f);
  EXPECT_TRUE(t.is_alternating());
  EXPECT_EQ(t.skew_part(), f);
  EXPECT_EQ(t.to_form(), f);
}

TEST(SlotSum, MatchesDirectEvaluation) {
  std::mt19937_64 rng(12);
  const auto j = standard_acs(3);
  const auto f = random_form(rng, 6, 3);
  const auto vs = random_vectors(rng, 6, 3);
  std::vector<std::vector<Rational>> jv;
  for (const auto& v : vs) jv.push_back(j.apply(v));
  const Rational want = oracle::evaluate(f, {jv[0], jv[1], vs[2]}) + oracle::evaluate(f, {jv[0], vs[1], jv[2]}) +
                        oracle::evaluate(f, {vs[0], jv[1], jv[2]});
  EXPECT_EQ(slot_sum(j, f).evaluate(vs), want);
}

TEST(TypeSplit, PartsAreEigenformsOfTheSlotSum) {
  std::mt19937_64 rng(13);
  const auto j = standard_acs(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_form(rng, 6, 3);
    const auto split = hermitian_type_split(f, j);
    EXPECT_EQ(split.pure + split.mixed, f);
    EXPECT_EQ(slot_sum(j, split.pure), split.pure * Rational(-3));
    EXPECT_EQ(slot_sum(j, split.mixed), split.mixed);
  }
  const auto w = random_form(rng, 6, 2);
  const auto s2 = hermitian_type_split(w, j);
  EXPECT_EQ(pullback(j, s2.pure), s2.pure * Rational(-1));
  EXPECT_EQ(pullback(j, s2.mixed), s2.mixed);
}

TEST(TypeSplit, RejectsNonComplexStructures) {
  Matrix<Rational> m = Matrix<Rational>::identity(4);
  EXPECT_THROW(hermitian_type_split(AltForm<Rational>(4, 2), m), std::domain_error);
}

// Orthonormal frame E_i = e_i / s_i for the metric diag(s_i^2).
TEST(Metric, InnerProductMatchesOrthonormalFrameSum) {
  std::mt19937_64 rng(14);
  const std::vector<Rational> s{1, 2, Rational(1, 3), 3, Rational(2, 5)};
  std::vector<Rational> d;
  for (const auto& x : s) d.push_back(x * x);
  const auto g = Metric<Rational>::diagonal(d);
  const auto a = random_form(rng, 5, 2), b = random_form(rng, 5, 2);
  Rational want = 0;
  for (int i = 0; i < 5; ++i)
    for (int k = i + 1; k < 5; ++k) {
      const std::vector<std::vector<Rational>> frame{oracle::unit(5, i, 1 / s[i]), oracle::unit(5, k, 1 / s[k])};
      want += oracle::evaluate(a, frame) * oracle::evaluate(b, frame);
    }
  EXPECT_EQ(form_inner(a, b, g), want);
}

TEST(Metric, ContractionMatchesOrthonormalFrameSum) {
  std::mt19937_64 rng(15);
  const std::vector<Rational> s{1, 2, Rational(1, 2), 3, 1, Rational(1, 3)};
  std::vector<Rational> d;
  for (const auto& x : s) d.push_back(x * x);
  const auto g = Metric<Rational>::diagonal(d);
  const auto w = random_form(rng, 6, 2), b = random_form(rng, 6, 3);
  const auto got = contract2(w, b, g);
  for (int x = 0; x < 6; ++x) {
    Rational want = 0;
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) {
        const auto ei = oracle::unit(6, i, 1 / s[i]), ek = oracle::unit(6, k, 1 / s[k]);
        want += oracle::evaluate(w, {ei, ek}) * oracle::evaluate(b, {ei, ek, oracle::unit(6, x)}) / 2;
      }
    EXPECT_EQ(got.coeff(Mask(1) << x), want);
  }
}

TEST(Metric, RejectsDegenerateOrAsymmetricMatrices) {
  Matrix<Rational> m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 1;
  m(1, 1) = 1;
  EXPECT_THROW(Metric<Rational>{m}, std::domain_error);
  m(1, 0) = 1;
  EXPECT_THROW(Metric<Rational>{m}, std::domain_error);
}

TEST(LeeForm, RecoversTheOneFormFromOmegaWedgeTheta) {
  std::mt19937_64 rng(16);
  for (int n : {3, 6}) {
    std::vector<Rational> weights;
    for (int i = 0; i < n; ++i) weights.push_back(Rational(1 + i % 3, 1 + i % 2));
    const auto w = hermitian_form(weights);
    const auto g = doubled_metric(weights);
    const auto theta = random_form(rng, 2 * n, 1, 1.0);
    EXPECT_EQ(lee_form(w, wedge(w, theta), g), theta) << "complex dimension " << n;
  }
}

TEST(LeeForm, VanishesOnPrimitiveForms) {
  // (3,0)+(0,3) forms are primitive.
  const std::vector<Rational> weights{1, 2, 3};
  const auto w = hermitian_form(weights);
  const auto g = doubled_metric(weights);
  std::mt19937_64 rng(17);
  const auto pure = hermitian_type_split(random_form(rng, 6, 3), standard_acs(3)).pure;
  EXPECT_TRUE(lee_form(w, pure, g).is_zero_form());
}
