#pragma once

// Independent reference computations used only by the tests. They work from
// definitions (sums over permutations, explicit frames) rather than from the
// library's sparse algorithms.

#include "twistor/exterior.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using twistor::AltForm;
using twistor::Matrix;
using twistor::Rational;

inline Rational random_rational(std::mt19937_64& rng, int range = 5) {
  std::uniform_int_distribution<int> num(-range, range), den(1, 4);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline AltForm<Rational> random_form(std::mt19937_64& rng, int dim, int degree, double density = 0.5) {
  AltForm<Rational> f(dim, degree);
  std::bernoulli_distribution keep(density);
  for (auto m : AltForm<Rational>::masks_of_degree(dim, degree))
    if (keep(rng)) f.set(m, random_rational(rng));
  return f;
}

inline std::vector<Rational> random_vector(std::mt19937_64& rng, int dim) {
  std::vector<Rational> v(dim);
  for (auto& x : v) x = random_rational(rng);
  return v;
}

inline Matrix<Rational> random_matrix(std::mt19937_64& rng, int dim) {
  Matrix<Rational> m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = random_rational(rng, 3);
  return m;
}

inline int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  return sign;
}

/// Value of a form on vectors straight from the definition: sum over all
/// permutations of the coefficient on sorted index tuples.
inline Rational evaluate(const AltForm<Rational>& f, const std::vector<std::vector<Rational>>& vs) {
  const int k = f.degree();
  Rational total = 0;
  for (const auto& [mask, c] : f.terms()) {
    const auto idx = twistor::mask_indices(mask);
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    do {
      Rational prod = c * permutation_sign(p);
      for (int r = 0; r < k; ++r) prod *= vs[p[r]][idx[r]];
      total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return total;
}

/// (a ^ b)(v_1..v_{p+q}) = sum over (p,q)-shuffles of sign * a(...) b(...).
inline Rational wedge_value(const AltForm<Rational>& a, const AltForm<Rational>& b,
                            const std::vector<std::vector<Rational>>& vs) {
  const int p = a.degree(), n = p + b.degree();
  Rational total = 0;
  for (unsigned choose = 0; choose < (1u << n); ++choose) {
    if (std::popcount(choose) != p) continue;
    std::vector<int> perm;
    std::vector<std::vector<Rational>> left, right;
    for (int i = 0; i < n; ++i)
      if (choose & (1u << i)) {
        perm.push_back(i);
        left.push_back(vs[i]);
      }
    for (int i = 0; i < n; ++i)
      if (!(choose & (1u << i))) {
        perm.push_back(i);
        right.push_back(vs[i]);
      }
    total += permutation_sign(perm) * evaluate(a, left) * evaluate(b, right);
  }
  return total;
}

/// Pfaffian by expansion along the first row.
inline Rational pfaffian(const Matrix<Rational>& a, std::vector<int> idx) {
  if (idx.empty()) return 1;
  const int i = idx.front();
  Rational total = 0;
  for (std::size_t t = 1; t < idx.size(); ++t) {
    const int j = idx[t];
    if (a(i, j) == 0) continue;
    std::vector<int> rest;
    for (std::size_t u = 1; u < idx.size(); ++u)
      if (u != t) rest.push_back(idx[u]);
    const Rational term = a(i, j) * pfaffian(a, rest);
    total += (t % 2 == 1) ? term : Rational(-term);
  }
  return total;
}

/// Skew matrix of a 2-form: a(i, j) = w(e_i, e_j).
inline Matrix<Rational> skew_matrix(const AltForm<Rational>& w) {
  Matrix<Rational> a(w.dim(), w.dim());
  for (int i = 0; i < w.dim(); ++i)
    for (int j = 0; j < w.dim(); ++j) a(i, j) = w.on_basis({i, j});
  return a;
}

inline std::vector<Rational> column(const Matrix<Rational>& m, int c) {
  std::vector<Rational> v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, c);
  return v;
}

inline std::vector<Rational> unit(int dim, int i, const Rational& scale = 1) {
  std::vector<Rational> v(dim, Rational(0));
  v[i] = scale;
  return v;
}

}  // namespace oracle
