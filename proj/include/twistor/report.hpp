#pragma once

#include "quaternionic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace twistor {

/// A computed quantity: its float value and, in exact mode, an exact string
/// ("p/q" or "sqrt(p/q)").
struct Quantity {
  double value = 0;
  std::string exact;
};

inline Quantity quantity_from_sq(const Rational& sq) {
  Quantity q;
  q.value = std::sqrt(std::max(0.0, sq.get_d()));
  Rational root;
  q.exact = exact_sqrt(sq, root) ? to_string(root) : "sqrt(" + to_string(sq) + ")";
  return q;
}
inline Quantity quantity_from_sq(double sq) { return {std::sqrt(std::max(0.0, sq)), {}}; }
inline Quantity quantity_of(const Rational& v) { return {v.get_d(), to_string(v)}; }
inline Quantity quantity_of(double v) { return {v, {}}; }

struct IdentityCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct IntrinsicTorsionSummary {
  bool skew = false;
  bool preserves_quaternions = false;
  bool orthogonal_to_sp1 = false;
  std::string sp1_scale;
  std::optional<std::size_t> invariant_dim;
  std::optional<bool> member;
  std::optional<double> membership_residual;
};

/// Signed scalars whose zeros locate the special members of the family.
struct Indicators {
  double eh_component = 0;  // Phi-coefficient of psi3_I: (mu - 2 lambda)/12
  double kahler = 0;        // Phi-coefficient of I.d(omega_I): mu/2 - 2 lambda
  double einstein = 0;      // difference of the two Ricci eigenvalues
  double j_w3 = 0;          // a^b^c coefficient of the W3 part of d(omega_J)
};

struct TorsionReport {
  bool exact = false;
  double lambda = 0, mu = 0;
  std::string lambda_text, mu_text;

  Quantity psi3_norm, psi3_I_norm, psi3_J_norm, psi3_K_norm;
  Quantity contractions_max;
  std::array<std::vector<std::string>, 3> gh;
  std::array<Quantity, 3> nijenhuis_norm;
  double nijenhuis_constant = 0;  // measured N_J / ((4 lambda + mu)/6 (3 Phi - mu^2 Psi))
  Quantity einstein_deviation;
  Indicators indicators;
  IntrinsicTorsionSummary xi;

  bool kahler = false, eh_zero = false, quaternionic = false, einstein = false, j_pure_w1 = false;

  std::vector<IdentityCheck> checks;

  bool all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
  }
};

struct AnalysisOptions {
  Tolerance tol{};
  bool torsion_space = true;  // solve for Q^{u(3)} and test membership of xi
};

namespace detail {

template <class S> Quantity norm_of(const AltForm<S>& f, const Metric<S>& g) { return quantity_from_sq(form_norm_sq(f, g)); }

template <class S> double phi_coefficient(const AltForm<S>& f, const AQHStructure<S>& s) {
  return to_double(S(form_inner(f, s.phi(), s.g()) / form_norm_sq(s.phi(), s.g())));
}

template <class S> AltForm<S> j_w3_part(const AQHStructure<S>& s, const DOmegas<S>& d, Tolerance tol) {
  const auto& dw = d.of(Acs::J);
  const auto lee = lee_form(s.omega(Acs::J), dw, s.g());
  return hermitian_type_split(dw, s.acs(Acs::J), tol).mixed - wedge(s.omega(Acs::J), lee);
}

template <class S> double j_w3_indicator(const AltForm<S>& w3) {
  using namespace so7;
  return to_double(w3.coeff((Mask(1) << A) | (Mask(1) << B) | (Mask(1) << C)));
}

inline std::string diff_detail(double v) {
  std::ostringstream os;
  os << "max deviation " << v;
  return os.str();
}

}  // namespace detail

/// Full report for one member of the family.
template <class S>
TorsionReport analyze(const ReductiveSplit<S>& split, const S& lambda, const AnalysisOptions& opt = {}) {
  const auto s = AQHStructure<S>::build(lambda);
  const Tolerance tol{ScalarTraits<S>::exact ? 0.0 : opt.tol.abs * s.zero_scale()};
  const auto& g = s.g();

  TorsionReport r;
  r.exact = ScalarTraits<S>::exact;
  r.lambda = to_double(s.lambda());
  r.mu = to_double(s.mu());
  r.lambda_text = to_string(s.lambda());
  r.mu_text = to_string(s.mu());

  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    r.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto equal_forms = [&](const std::string& name, const AltForm<S>& got, const AltForm<S>& want) {
    const auto diff = got - want;
    add(name, diff.is_zero_form(tol), detail::diff_detail(diff.max_abs()));
  };

  const auto problems = check_structure(s, tol);
  add("quaternion_identities", problems.empty(), problems.empty() ? "" : problems.front());
  const auto norm = check_normalization(s, opt.tol);
  add("volume_normalization", norm.holds,
      "omega0^3 omega0~^3 = " + to_string(norm.omega0_cubed_coeff) + ", omega_J^6 = " + to_string(norm.omega_j_sixth_coeff));

  const auto d = d_omegas(split, s);
  const auto expected_d = expected_rotated_d(s);
  for (Acs a : kAllAcs)
    equal_forms(std::string("rotated_d_omega_") + acs_name(a), d.rotated_of(a), expected_d[static_cast<int>(a)]);

  const auto b = betas(s, d);
  const auto expected_b = expected_betas(s);
  for (Acs a : kAllAcs) equal_forms(std::string("beta_") + acs_name(a), b.of(a), expected_b[static_cast<int>(a)]);
  {
    bool zero = true;
    S worst(0);
    for (const auto& row : b.contraction)
      for (const auto& c : row) {
        zero = zero && c.is_zero_form(tol);
        for (const auto& [mask, v] : c.terms()) {
          const S av = v < 0 ? S(-v) : S(v);
          if (av > worst) worst = av;
        }
      }
    add("contractions_vanish", zero, detail::diff_detail(b.contractions_max()));
    r.contractions_max = quantity_of(worst);
  }

  const auto p3 = psi3(b);
  const S l = s.lambda(), m = s.mu();
  equal_forms("psi3_formula", p3, s.phi() * S((S(4) * l + m) / S(12)));
  std::array<AltForm<S>, 3> p3a;
  for (Acs a : kAllAcs) p3a[static_cast<int>(a)] = psi3_component(s, b, a);
  equal_forms("psi3_I_formula", p3a[0], s.phi() * S((m - S(2) * l) / S(12)));
  r.psi3_norm = detail::norm_of(p3, g);
  r.psi3_I_norm = detail::norm_of(p3a[0], g);
  r.psi3_J_norm = detail::norm_of(p3a[1], g);
  r.psi3_K_norm = detail::norm_of(p3a[2], g);

  const auto der = derivatives(split, s);
  add("levi_civita", torsion_failures(split, der.nomizu, tol) == 0 && metricity_failures(der.nomizu, g, tol) == 0);
  for (Acs a : kAllAcs)
    equal_forms(std::string("alternation_d_omega_") + acs_name(a), alternation(der.nabla_omega[static_cast<int>(a)]),
                d.of(a));

  const auto cd = curvature(split, der.nomizu, g);
  add("curvature_identities", check_curvature(cd, g, tol).all_pass());
  const S dev_sq = einstein_deviation_sq(cd, g);
  r.einstein_deviation = quantity_from_sq(dev_sq);
  r.indicators.einstein = to_double(einstein_indicator(cd, g));

  const auto it = intrinsic_torsion(s, der, opt.tol);
  r.xi.skew = it.skew;
  r.xi.preserves_quaternions = it.preserves_quaternions;
  r.xi.orthogonal_to_sp1 = it.orthogonal_to_sp1;
  r.xi.sp1_scale = to_string(it.sp1_scale);
  add("intrinsic_torsion", it.skew && it.preserves_quaternions && it.orthogonal_to_sp1,
      "sp(1) coefficient " + r.xi.sp1_scale);

  std::array<Nijenhuis<S>, 3> nij;
  for (Acs a : kAllAcs) {
    nij[static_cast<int>(a)] = nijenhuis(s, der, a, opt.tol);
    r.nijenhuis_norm[static_cast<int>(a)] = quantity_from_sq(nij[static_cast<int>(a)].norm_sq);
  }
  {
    const S msq = m * m;
    const auto ref_j = s.phi() * S(3) - s.psi() * msq;
    const auto ref_k = s.phi() * S(3) + s.psi() * msq;
    const auto pj = proportionality(nij[1].skew_part, ref_j, g);
    const auto pk = proportionality(nij[2].skew_part, ref_k, g);
    const double expected = (4 * r.lambda + r.mu) / 6;
    r.nijenhuis_constant = pj.factor / expected;
    const double ang_tol = std::max(opt.tol.abs, 1e-12);
    const bool ok = nij[0].lowered.max_abs() <= tol.abs && nij[1].totally_skew && nij[2].totally_skew &&
                    pj.angle <= ang_tol && pk.angle <= ang_tol &&
                    std::fabs(pj.factor - pk.factor) <= ang_tol * std::fabs(expected);
    std::ostringstream os;
    os << "N_J, N_K = " << r.nijenhuis_constant << " * (4 lambda + mu)/6 (3 Phi -+ mu^2 Psi); angles " << pj.angle
       << ", " << pk.angle;
    add("nijenhuis_shape", ok, os.str());
    const auto total = nij[0].skew_part + nij[1].skew_part + nij[2].skew_part;
    add("nijenhuis_sum_along_phi", proportionality(total, s.phi(), g).angle <= ang_tol);
  }

  for (Acs a : kAllAcs) r.gh[static_cast<int>(a)] = gray_hervella(s, d, nij[static_cast<int>(a)], a, opt.tol).names();

  r.indicators.eh_component = detail::phi_coefficient(p3a[0], s);
  r.indicators.kahler = detail::phi_coefficient(d.rotated_of(Acs::I), s);
  r.indicators.j_w3 = detail::j_w3_indicator(detail::j_w3_part(s, d, tol));

  r.kahler = r.gh[0].empty();
  r.eh_zero = p3a[0].is_zero_form(tol);
  r.quaternionic = p3.is_zero_form(tol);
  r.einstein = ScalarTraits<S>::exact ? is_zero(dev_sq, Tolerance{0.0}) : r.einstein_deviation.value <= tol.abs;
  r.j_pure_w1 = r.gh[1] == std::vector<std::string>{"W1"};

  if (opt.torsion_space) {
    TorsionSpace<S> space(split, s, opt.tol);
    const auto basis = space.invariant_basis();
    r.xi.invariant_dim = basis.size();
    if constexpr (ScalarTraits<S>::exact) {
      r.xi.member = space.membership_defect(it.xi) == 0 && space.in_span(basis, it.xi);
      r.xi.membership_residual = 0.0;
    } else {
      const double res = basis.empty() ? 1.0 : space.span_residual(basis, it.xi);
      r.xi.membership_residual = res;
      r.xi.member = res <= opt.tol.abs;
    }
    add("intrinsic_torsion_invariant", *r.xi.member);
  }
  return r;
}

enum class IndicatorKind { EHComponent, Kahler, Einstein, JW3 };

inline const char* indicator_name(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::EHComponent: return "eh_component";
    case IndicatorKind::Kahler: return "kahler";
    case IndicatorKind::Einstein: return "einstein";
    case IndicatorKind::JW3: return "j_w3";
  }
  return "?";
}

/// Cheap float evaluation of one indicator, used by bisection.
inline double indicator_at(const ReductiveSplit<double>& split, double lambda, IndicatorKind kind) {
  const auto s = AQHStructure<double>::build(lambda);
  switch (kind) {
    case IndicatorKind::Einstein: {
      const auto nm = nomizu(split, s.g());
      return einstein_indicator(curvature(split, nm, s.g()), s.g());
    }
    case IndicatorKind::Kahler: {
      const auto d = d_omegas(split, s);
      return detail::phi_coefficient(d.rotated_of(Acs::I), s);
    }
    case IndicatorKind::EHComponent: {
      const auto d = d_omegas(split, s);
      return detail::phi_coefficient(psi3_component(s, betas(s, d), Acs::I), s);
    }
    case IndicatorKind::JW3: {
      const auto d = d_omegas(split, s);
      return detail::j_w3_indicator(detail::j_w3_part(s, d, Tolerance{1e-12}));
    }
  }
  return 0;
}

inline double indicator_of(const TorsionReport& r, IndicatorKind kind) {
  switch (kind) {
    case IndicatorKind::EHComponent: return r.indicators.eh_component;
    case IndicatorKind::Kahler: return r.indicators.kahler;
    case IndicatorKind::Einstein: return r.indicators.einstein;
    case IndicatorKind::JW3: return r.indicators.j_w3;
  }
  return 0;
}

/// Root of f on [lo, hi] with f(lo) f(hi) < 0; at most `iterations` halvings.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 60) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Crossing {
  IndicatorKind indicator;
  std::size_t index = 0;  // grid interval [index, index+1], or grid point when on_grid
  bool on_grid = false;
  double lambda = 0;  // refined root
};

struct SweepSpec {
  std::string start, stop;
  std::size_t count = 2;
  bool log = false;
};

/// Grid points of a sweep as exact rationals (linear sweeps only).
inline std::vector<Rational> rational_grid(const SweepSpec& sp) {
  if (sp.log) throw DomainError("exact sweeps must be linearly spaced");
  const Rational a = parse_rational(sp.start), b = parse_rational(sp.stop);
  std::vector<Rational> out;
  for (std::size_t k = 0; k < sp.count; ++k) {
    Rational x = a + (b - a) * Rational(static_cast<long>(k), static_cast<long>(sp.count - 1));
    x.canonicalize();
    out.push_back(x);
  }
  return out;
}

inline std::vector<double> float_grid(const SweepSpec& sp, const std::function<double(const std::string&)>& parse) {
  const double a = parse(sp.start), b = parse(sp.stop);
  std::vector<double> out;
  for (std::size_t k = 0; k < sp.count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(sp.count - 1);
    out.push_back(sp.log ? a * std::pow(b / a, t) : a + (b - a) * t);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

inline void validate_sweep(const SweepSpec& sp, double a, double b) {
  if (!(a > 0) || !(b > 0)) throw DomainError("sweep bounds must be positive");
  if (sp.count < 2) throw DomainError("a sweep needs at least 2 points");
  if (!(b > a)) throw DomainError("sweep stop must exceed start");
}

/// Sign changes of every indicator along the sweep, refined by bisection
/// when `refine` is set. Grid points where an indicator is zero within
/// tolerance count as a single crossing.
inline std::vector<Crossing> find_crossings(const std::vector<TorsionReport>& reports, double zero_tol, bool refine) {
  static const ReductiveSplit<double> split(so7_data());
  std::vector<Crossing> out;
  for (auto kind : {IndicatorKind::EHComponent, IndicatorKind::Kahler, IndicatorKind::Einstein, IndicatorKind::JW3}) {
    std::vector<int> sign;
    for (const auto& r : reports) {
      const double v = indicator_of(r, kind);
      const double scale = std::pow(std::max({1.0, r.lambda, r.mu}), 3);
      sign.push_back(std::fabs(v) <= zero_tol * scale ? 0 : (v > 0 ? 1 : -1));
    }
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (sign[k] == 0 && (k == 0 || sign[k - 1] != 0)) {
        out.push_back({kind, k, true, reports[k].lambda});
        continue;
      }
      if (k + 1 < reports.size() && sign[k] * sign[k + 1] < 0) {
        Crossing c{kind, k, false, 0.5 * (reports[k].lambda + reports[k + 1].lambda)};
        if (refine)
          c.lambda = bisect([&](double x) { return indicator_at(split, x, kind); }, reports[k].lambda,
                            reports[k + 1].lambda);
        out.push_back(c);
      }
    }
  }
  return out;
}

/// The four special loci and the crossings that locate them. Einstein
/// crossings that coincide with a Kahler crossing belong to the Kahler locus.
struct LocusSummary {
  std::string name;
  std::string condition;
  std::vector<double> roots;
};

inline std::vector<LocusSummary> summarize_loci(const std::vector<Crossing>& crossings) {
  std::vector<LocusSummary> out{{"eh_zero", "2 lambda = mu", {}},
                                {"kahler", "4 lambda = mu", {}},
                                {"einstein", "8 lambda = 3 mu", {}},
                                {"j_pure_w1", "4 lambda = 3 mu", {}}};
  std::vector<double> kahler_roots;
  for (const auto& c : crossings)
    if (c.indicator == IndicatorKind::Kahler) kahler_roots.push_back(c.lambda);
  for (const auto& c : crossings) {
    switch (c.indicator) {
      case IndicatorKind::EHComponent: out[0].roots.push_back(c.lambda); break;
      case IndicatorKind::Kahler: out[1].roots.push_back(c.lambda); break;
      case IndicatorKind::Einstein: {
        const bool is_kahler = std::any_of(kahler_roots.begin(), kahler_roots.end(),
                                           [&](double k) { return std::fabs(k - c.lambda) < 1e-6; });
        if (!is_kahler) out[2].roots.push_back(c.lambda);
        break;
      }
      case IndicatorKind::JW3: out[3].roots.push_back(c.lambda); break;
    }
  }
  return out;
}

/// Runs `job` over every index in [0, n), using several threads; results are
/// returned in index order.
template <class T, class F> std::vector<T> parallel_map(std::size_t n, F job) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<T> out(n);
  std::vector<std::future<void>> futures;
  for (std::size_t w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = job(i);
    }));
  for (auto& f : futures) f.get();
  return out;
}

}  // namespace twistor
