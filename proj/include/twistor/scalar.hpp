#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace twistor {

using Rational = mpq_class;

/// Comparison tolerance for the floating-point realization. Exact scalars
/// ignore it.
struct Tolerance {
  double abs = 1e-10;
};

template <class S> struct ScalarTraits;

template <> struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static bool is_zero(const Rational& x, Tolerance = {}) { return sgn(x) == 0; }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_rational(const Rational& q) { return q; }
  static std::string to_string(Rational x) {
    x.canonicalize();
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
  }
  static double abs_value(const Rational& x) { return std::fabs(x.get_d()); }
};

template <> struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static bool is_zero(double x, Tolerance tol = {}) { return std::fabs(x) <= tol.abs; }
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static std::string to_string(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }
  static double abs_value(double x) { return std::fabs(x); }
};

template <class S> bool is_zero(const S& x, Tolerance tol = {}) {
  return ScalarTraits<S>::is_zero(x, tol);
}
template <class S> double to_double(const S& x) { return ScalarTraits<S>::to_double(x); }
template <class S> S scalar_from(const Rational& q) { return ScalarTraits<S>::from_rational(q); }
template <class S> S scalar_from(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return ScalarTraits<S>::from_rational(q);
}
template <class S> std::string to_string(const S& x) { return ScalarTraits<S>::to_string(x); }

/// Exact rational from "p/q", an integer, or a finite decimal such as "0.125"
/// or "1e-3". Throws std::invalid_argument otherwise.
inline Rational parse_rational(const std::string& text) {
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
    trimmed.pop_back();
  std::size_t start = 0;
  while (start < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[start])))
    ++start;
  trimmed = trimmed.substr(start);
  if (trimmed.empty()) throw std::invalid_argument("empty rational");

  auto digits_only = [](const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };

  if (auto slash = trimmed.find('/'); slash != std::string::npos) {
    auto num = trimmed.substr(0, slash);
    auto den = trimmed.substr(slash + 1);
    if (!digits_only(num, true) || !digits_only(den, false))
      throw std::invalid_argument("malformed rational: " + text);
    if (num[0] == '+') num = num.substr(1);
    const mpz_class n(num, 10), d(den, 10);
    if (d == 0) throw std::invalid_argument("zero denominator: " + text);
    Rational q{n, d};
    q.canonicalize();
    return q;
  }

  // Decimal with optional exponent.
  std::string mantissa = trimmed;
  long exponent = 0;
  if (auto e = trimmed.find_first_of("eE"); e != std::string::npos) {
    mantissa = trimmed.substr(0, e);
    auto exp_text = trimmed.substr(e + 1);
    if (!digits_only(exp_text, true)) throw std::invalid_argument("malformed number: " + text);
    exponent = std::stol(exp_text);
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa = mantissa.substr(1);
  }
  std::string int_part = mantissa, frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw std::invalid_argument("malformed number: " + text);
  if ((!int_part.empty() && !digits_only(int_part, false)) ||
      (!frac_part.empty() && !digits_only(frac_part, false)))
    throw std::invalid_argument("malformed number: " + text);
  mpz_class num((int_part.empty() ? std::string("0") : int_part) + frac_part, 10);
  long scale = static_cast<long>(frac_part.size()) - exponent;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  Rational q = scale >= 0 ? Rational(num, ten_pow) : Rational(num * ten_pow, 1);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

/// Exact square root of a non-negative rational when it is a perfect square.
inline bool exact_sqrt(const Rational& x, Rational& out) {
  if (sgn(x) < 0) return false;
  mpz_class n = x.get_num(), d = x.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  out = Rational(rn, rd);
  out.canonicalize();
  return true;
}

}  // namespace twistor
