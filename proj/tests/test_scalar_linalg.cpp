#include "twistor/linalg.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace twistor;

TEST(ParseRational, AcceptsFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("3/8"), Rational(3, 8));
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("2.5e-1"), Rational(1, 4));
  EXPECT_EQ(parse_rational("  1/2 "), Rational(1, 2));
}

TEST(ParseRational, RejectsMalformedInput) {
  for (const char* bad : {"", "1/0", "abc", "1//2", "1.2.3", "sqrt(2)", "e5"})
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
}

TEST(ExactSqrt, RecognizesPerfectSquares) {
  Rational r;
  EXPECT_TRUE(exact_sqrt(Rational(9, 16), r));
  EXPECT_EQ(r, Rational(3, 4));
  EXPECT_FALSE(exact_sqrt(Rational(3, 8), r));
  EXPECT_TRUE(exact_sqrt(Rational(0), r));
  EXPECT_EQ(r, Rational(0));
}

TEST(Scalar, ToStringIsCanonical) {
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(Rational(-2)), "-2");
}

TEST(RowReduce, RankOfKnownMatrices) {
  std::vector<std::vector<Rational>> m{{1, 2, 3}, {2, 4, 6}, {1, 0, 1}};
  EXPECT_EQ(rank(m), 2u);
  std::vector<std::vector<double>> f{{1, 2, 3}, {2, 4, 6 + 1e-14}, {1, 0, 1}};
  EXPECT_EQ(rank(f, Tolerance{1e-10}), 2u);
}

TEST(RowReduce, KernelVectorsAreAnnihilated) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dist(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<Rational>> a(4, std::vector<Rational>(7));
    for (auto& row : a)
      for (auto& x : row) x = dist(rng);
    const auto rr = row_reduce(a, 7);
    const auto ker = rr.kernel();
    EXPECT_EQ(rr.rank() + ker.size(), 7u);
    for (const auto& v : ker)
      for (const auto& row : a) {
        Rational dot = 0;
        for (int j = 0; j < 7; ++j) dot += row[j] * v[j];
        EXPECT_EQ(dot, 0);
      }
  }
}

TEST(Inverse, ProductIsIdentity) {
  Matrix<Rational> m(3, 3);
  m(0, 0) = 2;
  m(0, 1) = 1;
  m(1, 1) = 3;
  m(1, 2) = -1;
  m(2, 0) = 1;
  m(2, 2) = 4;
  const auto inv = inverse(m);
  EXPECT_TRUE(approx_equal(Matrix<Rational>(m * inv), Matrix<Rational>::identity(3)));
}

TEST(Inverse, SingularMatrixThrows) {
  Matrix<Rational> m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 4;
  EXPECT_THROW(inverse(m), std::domain_error);
}

// Commutant of a fixed matrix, checked against a direct solve of XA = AX.
TEST(JointKernel, CommutantMatchesDirectSolve) {
  Matrix<Rational> a(3, 3);
  a(0, 1) = -1;
  a(1, 0) = 1;  // rotation block plus a zero eigenvalue
  JointKernel<Rational> k(9);
  k.constrain([&](const std::vector<Rational>& v) {
    Matrix<Rational> x(3, 3);
    for (int i = 0; i < 9; ++i) x(i / 3, i % 3) = v[i];
    return commutator(x, a).data();
  });
  // Commutant of diag(J2, 0) is {aI + bJ2} (+) R: dimension 3.
  EXPECT_EQ(k.dimension(), 3u);
}

// A redundant constraint whose images are pure round-off must not cut the
// kernel in floating point.
TEST(JointKernel, RedundantFloatConstraintKeepsKernel) {
  const double l = 0.731, m = 1 / l;
  Matrix<double> i(4, 4), j(4, 4);
  i(1, 0) = 1;
  i(0, 1) = -1;
  i(3, 2) = 1;
  i(2, 3) = -1;
  j(2, 0) = l;
  j(3, 1) = -l;
  j(0, 2) = -m;
  j(1, 3) = m;
  const Matrix<double> kk = i * j;
  JointKernel<double> ker(16, Tolerance{1e-10});
  std::vector<std::size_t> dims;
  for (const Matrix<double>* op : std::initializer_list<const Matrix<double>*>{&i, &j, &kk}) {
    ker.constrain([&](const std::vector<double>& v) {
      Matrix<double> x(4, 4);
      for (int t = 0; t < 16; ++t) x(t / 4, t % 4) = v[t];
      return commutator(x, *op).data();
    });
    dims.push_back(ker.dimension());
  }
  EXPECT_EQ(dims[1], dims[2]);
  EXPECT_GT(dims[2], 0u);
}
