#pragma once

#include "report.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace twistor {

/// Seeded sampler of rational parameters num/den with num, den <= 64, in (0, 4].
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}

  Rational next() {
    std::uniform_int_distribution<long> den(1, 64), num(1, 64);
    for (;;) {
      const long d = den(rng_), n = num(rng_);
      if (n > 4 * d) continue;
      Rational q(n, d);
      q.canonicalize();
      return q;
    }
  }

  std::vector<Rational> take(std::size_t n) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(next());
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

struct SelfTestResult {
  std::string name;
  std::string claim;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct SelfTestConfig {
  std::uint64_t seed = 20240607;
  Tolerance tol{1e-10};
  const So7Data* data = nullptr;  // defaults to the canonical so(7) data
};

inline std::string format_root(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

namespace detail {

struct CheckContext {
  const So7Data& data;
  ReductiveSplit<Rational> exact;
  ReductiveSplit<double> fl;
  SelfTestConfig cfg;
};

inline std::string join_failures(const std::vector<std::string>& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size() && i < 4; ++i) out += (i ? "; " : "") + f[i];
  if (f.size() > 4) out += "; ... (" + std::to_string(f.size()) + " total)";
  return out;
}

template <class S> bool forms_equal(const AltForm<S>& a, const AltForm<S>& b, Tolerance tol) {
  return (a - b).is_zero_form(tol);
}

}  // namespace detail

using SelfTestBody = std::function<std::string(detail::CheckContext&, std::vector<std::string>&)>;

struct SelfTestCase {
  std::string name;
  std::string claim;
  SelfTestBody body;  // appends failure messages; returns a summary
};

inline std::vector<SelfTestCase> selftest_cases() {
  using detail::CheckContext;
  std::vector<SelfTestCase> cases;

  cases.push_back({"structure_equations", "d_M of the twelve basis one-forms",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     int ok = 0;
                     for (const auto& e : verify_structure_table(c.data))
                       e.passed ? ++ok : (f.push_back(e.form + ": " + e.diff), 0);
                     return std::to_string(ok) + "/12 entries";
                   }});

  cases.push_back({"jacobi_identity", "so(7) bracket satisfies Jacobi",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     const int bad = jacobi_failures(c.data);
                     if (bad) f.push_back(std::to_string(bad) + " failing triples");
                     return std::to_string(bad) + " failing triples";
                   }});

  cases.push_back({"invariant_forms", "invariant 2- and 4-forms: dims 2 (u3), 4 (su3), 4 (u3, rank-4 basis)",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     const auto d2u = invariant_subspace(c.exact, 2, Subalgebra::U3).dimension();
                     const auto d2s = invariant_subspace(c.exact, 2, Subalgebra::SU3).dimension();
                     const auto d4 = invariant_subspace(c.exact, 4, Subalgebra::U3);
                     if (d2u != 2) f.push_back("u(3) 2-forms: " + std::to_string(d2u));
                     if (d2s != 4) f.push_back("su(3) 2-forms: " + std::to_string(d2s));
                     if (d4.dimension() != 4) f.push_back("u(3) 4-forms: " + std::to_string(d4.dimension()));
                     const auto s = AQHStructure<Rational>::build(Rational(1));
                     const std::vector<AltForm<Rational>> cands{
                         wedge(s.omega0(), s.omega0()), wedge(s.omega0_tilde(), s.omega0_tilde()),
                         wedge(s.omega0(), s.omega0_tilde()),
                         wedge(s.omega(Acs::J), s.omega(Acs::J)) + wedge(s.omega(Acs::K), s.omega(Acs::K))};
                     std::vector<std::vector<Rational>> rows;
                     for (const auto& w : cands) {
                       if (!in_span(d4.basis, w)) f.push_back("candidate 4-form is not invariant");
                       rows.push_back(w.dense());
                     }
                     const auto rk = rank(rows);
                     if (rk != 4) f.push_back("candidate 4-forms have rank " + std::to_string(rk));
                     return std::to_string(d2u) + "/" + std::to_string(d2s) + "/" + std::to_string(d4.dimension()) +
                            ", rank " + std::to_string(rk);
                   }});

  cases.push_back(
      {"torsion_invariant_dim", "dim Q^u(3) agrees with a metric-free count of invariants in m* (x) L^2 m*",
       [](CheckContext& c, std::vector<std::string>& f) {
         const auto s = AQHStructure<Rational>::build(Rational(1));
         TorsionSpace<Rational> space(c.exact, s);
         const auto dq = space.invariant_basis().size();
         if (space.sp3_dimension() != 21) f.push_back("dim sp(3) = " + std::to_string(space.sp3_dimension()));
         if (space.complement_dimension() != 42)
           f.push_back("dim complement = " + std::to_string(space.complement_dimension()));
         // Every u(3)-invariant in m* (x) L^2 m* lies in Q: sp(3) + sp(1) share no summand with m.
         const int n = so7::kM, pairs = n * (n - 1) / 2;
         auto unpack = [&](const std::vector<Rational>& v) {
           std::vector<Matrix<Rational>> out;
           for (int x = 0; x < n; ++x) {
             Matrix<Rational> w(n, n);
             int t = 0;
             for (int i = 0; i < n; ++i)
               for (int j = i + 1; j < n; ++j, ++t) {
                 w(i, j) = v[x * pairs + t];
                 w(j, i) = -v[x * pairs + t];
               }
             out.push_back(w);
           }
           return out;
         };
         JointKernel<Rational> k(static_cast<std::size_t>(n) * pairs);
         for (const auto& d : subalgebra_actions(c.exact, Subalgebra::U3))
           k.constrain([&](const std::vector<Rational>& v) {
             const auto t = unpack(v);
             std::vector<Rational> out;
             for (int x = 0; x < n; ++x) {
               Matrix<Rational> m = -(d.transpose() * t[x] + t[x] * d);
               for (int y = 0; y < n; ++y)
                 if (d(y, x) != 0) m -= t[y] * d(y, x);
               out.insert(out.end(), m.data().begin(), m.data().end());
             }
             return out;
           });
         if (k.dimension() != dq)
           f.push_back("Q^u(3) has dim " + std::to_string(dq) + ", metric-free count " + std::to_string(k.dimension()));
         return "dim " + std::to_string(dq) + " (metric-free count " + std::to_string(k.dimension()) + ")";
       }});

  cases.push_back({"volume_normalization", "20 l^3 m^3 omega0^3 omega0~^3 = omega_J^6 when l m = 1",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed);
                     std::string summary;
                     for (const auto& l : rs.take(3)) {
                       const auto n = check_normalization(AQHStructure<Rational>::build(l));
                       if (!n.holds) f.push_back("lambda " + to_string(l));
                       summary = "omega0^3 omega0~^3 = " + to_string(n.omega0_cubed_coeff) +
                                 " vol, omega_J^6 = " + to_string(n.omega_j_sixth_coeff) + " vol";
                     }
                     return summary;
                   }});

  cases.push_back({"d_omega_formulas", "A.d(omega_A) closed forms at 20 seeded rational lambda",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed);
                     for (const auto& l : rs.take(20)) {
                       const auto s = AQHStructure<Rational>::build(l);
                       const auto d = d_omegas(c.exact, s);
                       const auto want = expected_rotated_d(s);
                       for (Acs a : kAllAcs)
                         if (!detail::forms_equal(d.rotated_of(a), want[static_cast<int>(a)], Tolerance{0.0}))
                           f.push_back(std::string(acs_name(a)) + " at lambda " + to_string(l));
                     }
                     return std::string("20 values, exact");
                   }});

  cases.push_back({"minimal_description", "beta_A closed forms and all nine contractions vanish",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed + 1);
                     for (const auto& l : rs.take(5)) {
                       const auto s = AQHStructure<Rational>::build(l);
                       const auto b = betas(s, d_omegas(c.exact, s));
                       const auto want = expected_betas(s);
                       for (Acs a : kAllAcs)
                         if (!detail::forms_equal(b.of(a), want[static_cast<int>(a)], Tolerance{0.0}))
                           f.push_back(std::string("beta_") + acs_name(a) + " at lambda " + to_string(l));
                       if (b.contractions_max() != 0) f.push_back("contraction nonzero at lambda " + to_string(l));
                     }
                     return std::string("5 values, exact");
                   }});

  cases.push_back({"psi3_formulas", "psi3 = (4l+m) Phi/12 nonzero; psi3_I = (m-2l) Phi/12; root at 2^-1/2",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed + 2);
                     for (const auto& l : rs.take(5)) {
                       const auto s = AQHStructure<Rational>::build(l);
                       const auto b = betas(s, d_omegas(c.exact, s));
                       const Rational m = s.mu();
                       const auto p = psi3(b);
                       if (!detail::forms_equal(p, s.phi() * Rational((4 * l + m) / 12), Tolerance{0.0}))
                         f.push_back("psi3 at lambda " + to_string(l));
                       if (p.is_zero_form()) f.push_back("psi3 vanishes at lambda " + to_string(l));
                       if (!detail::forms_equal(psi3_component(s, b, Acs::I), s.phi() * Rational((m - 2 * l) / 12),
                                                Tolerance{0.0}))
                         f.push_back("psi3_I at lambda " + to_string(l));
                     }
                     const double root = bisect(
                         [&](double x) { return indicator_at(c.fl, x, IndicatorKind::EHComponent); }, 0.5, 1.0);
                     if (std::fabs(root - std::sqrt(0.5)) > 1e-8) f.push_back("EH root " + format_root(root));
                     return "EH root " + format_root(root);
                   }});

  cases.push_back({"intrinsic_torsion", "xi is g-skew, nabla^LC + xi preserves span{I,J,K}, xi in Q^u(3)",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed + 3);
                     const auto ls = rs.take(5);
                     {
                       const auto s = AQHStructure<Rational>::build(ls.front());
                       const auto it = intrinsic_torsion(s, derivatives(c.exact, s));
                       if (!(it.skew && it.preserves_quaternions && it.orthogonal_to_sp1 &&
                             it.sp1_scale == Rational(1, 2)))
                         f.push_back("exact xi invalid at lambda " + to_string(ls.front()));
                       TorsionSpace<Rational> space(c.exact, s);
                       const auto basis = space.invariant_basis();
                       if (space.membership_defect(it.xi) != 0 || !space.in_span(basis, it.xi))
                         f.push_back("exact xi not invariant at lambda " + to_string(ls.front()));
                     }
                     double worst = 0;
                     for (const auto& l : ls) {
                       const auto s = AQHStructure<double>::build(l.get_d());
                       const auto it = intrinsic_torsion(s, derivatives(c.fl, s), c.cfg.tol);
                       if (!(it.skew && it.preserves_quaternions && it.orthogonal_to_sp1))
                         f.push_back("float xi invalid at lambda " + to_string(l));
                       TorsionSpace<double> space(c.fl, s, c.cfg.tol);
                       const auto basis = space.invariant_basis();
                       const double res = basis.empty() ? 1.0 : space.span_residual(basis, it.xi);
                       worst = std::max(worst, res);
                       if (res > c.cfg.tol.abs) f.push_back("float residual " + format_root(res));
                     }
                     return "max float residual " + format_root(worst);
                   }});

  cases.push_back({"gray_hervella", "GH(I)={W3} at 1, {} at 1/2; GH(J)=GH(K)={W1,W3} at 1, {W1} at sqrt(3)/2",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     auto classes = [&](auto split, auto l) {
                       const auto s = AQHStructure<decltype(l)>::build(l);
                       const auto d = d_omegas(*split, s);
                       const auto der = derivatives(*split, s);
                       std::array<std::vector<std::string>, 3> out;
                       for (Acs a : kAllAcs)
                         out[static_cast<int>(a)] = gray_hervella(s, d, nijenhuis(s, der, a, c.cfg.tol), a, c.cfg.tol).names();
                       return out;
                     };
                     using V = std::vector<std::string>;
                     const auto at1 = classes(&c.exact, Rational(1));
                     if (at1[0] != V{"W3"}) f.push_back("GH(I) at 1");
                     if (at1[1] != V{"W1", "W3"} || at1[2] != V{"W1", "W3"}) f.push_back("GH(J), GH(K) at 1");
                     const auto half = classes(&c.exact, Rational(1, 2));
                     if (!half[0].empty()) f.push_back("GH(I) at 1/2 not empty");
                     const auto pure = classes(&c.fl, std::sqrt(3.0) / 2);
                     if (pure[1] != V{"W1"} || pure[2] != V{"W1"}) f.push_back("GH(J), GH(K) at sqrt(3)/2");
                     RationalSampler rs(c.cfg.seed + 4);
                     for (const auto& l : rs.take(3)) {
                       if (l == Rational(1, 2)) continue;
                       if (classes(&c.exact, l)[0] != V{"W3"}) f.push_back("GH(I) at " + to_string(l));
                     }
                     return std::string("special values and 3 seeded values");
                   }});

  cases.push_back({"nijenhuis", "N_I = 0; N_J, N_K skew and along 3 Phi -+ m^2 Psi; constant stable",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed + 5);
                     std::vector<double> constants;
                     for (const auto& l : rs.take(5)) {
                       const auto r = analyze(c.exact, l, AnalysisOptions{c.cfg.tol, false});
                       for (const auto& ch : r.checks)
                         if ((ch.name == "nijenhuis_shape" || ch.name == "nijenhuis_sum_along_phi") && !ch.passed)
                           f.push_back(ch.name + " at lambda " + to_string(l));
                       if (r.nijenhuis_norm[0].value != 0) f.push_back("N_I nonzero at lambda " + to_string(l));
                       constants.push_back(r.nijenhuis_constant);
                     }
                     double mean = 0, var = 0;
                     for (double x : constants) mean += x / constants.size();
                     for (double x : constants) var += (x - mean) * (x - mean) / constants.size();
                     if (var > 1e-10) f.push_back("constant varies: variance " + format_root(var));
                     return "measured constant " + format_root(mean) + ", variance " + format_root(var);
                   }});

  cases.push_back({"einstein", "Einstein exactly at 1/2 and at sqrt(3/8); two zeros on [0.1, 10]",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     auto dev_sq = [&](const Rational& l) {
                       const auto g = InvariantMetric<Rational>::normalized(l);
                       return einstein_deviation_sq(curvature(c.exact, nomizu(c.exact, g.metric()), g.metric()),
                                                    g.metric());
                     };
                     if (dev_sq(Rational(1, 2)) != 0) f.push_back("not Einstein at 1/2");
                     const double at38 = einstein_deviation(c.fl, InvariantMetric<double>::normalized(std::sqrt(0.375)));
                     if (!(at38 < 1e-9)) f.push_back("deviation at sqrt(3/8): " + format_root(at38));
                     for (const auto& l : {Rational(1), Rational(2, 5), Rational(4, 5)})
                       if (!(dev_sq(l) > 0)) f.push_back("Einstein at " + to_string(l));
                     std::vector<double> grid, vals;
                     for (int k = 0; k < 200; ++k) {
                       grid.push_back(0.1 * std::pow(100.0, k / 199.0));
                       vals.push_back(indicator_at(c.fl, grid.back(), IndicatorKind::Einstein));
                     }
                     std::vector<double> roots;
                     for (std::size_t k = 0; k + 1 < grid.size(); ++k)
                       if (vals[k] * vals[k + 1] < 0)
                         roots.push_back(bisect([&](double x) { return indicator_at(c.fl, x, IndicatorKind::Einstein); },
                                                grid[k], grid[k + 1]));
                     if (roots.size() != 2) f.push_back(std::to_string(roots.size()) + " zeros on the log sweep");
                     std::string out = std::to_string(roots.size()) + " zeros:";
                     for (double r : roots) out += " " + format_root(r);
                     return out;
                   }});

  cases.push_back({"alternation", "alternation of nabla omega_A equals d omega_A, exact at 5 values",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed + 6);
                     for (const auto& l : rs.take(5)) {
                       const auto s = AQHStructure<Rational>::build(l);
                       const auto d = d_omegas(c.exact, s);
                       const auto der = derivatives(c.exact, s);
                       for (Acs a : kAllAcs)
                         if (!detail::forms_equal(alternation(der.nabla_omega[static_cast<int>(a)]), d.of(a),
                                                  Tolerance{0.0}))
                           f.push_back(std::string(acs_name(a)) + " at lambda " + to_string(l));
                     }
                     return std::string("5 values, exact");
                   }});

  cases.push_back({"float_matches_exact", "float pipeline agrees with the exact one at seeded rational lambda",
                   [](CheckContext& c, std::vector<std::string>& f) {
                     RationalSampler rs(c.cfg.seed + 7);
                     double worst = 0;
                     for (const auto& l : rs.take(3)) {
                       const AnalysisOptions opt{c.cfg.tol, false};
                       const auto e = analyze(c.exact, l, opt);
                       const auto x = analyze(c.fl, l.get_d(), opt);
                       if (!x.all_checks_pass()) f.push_back("float identity checks fail at " + to_string(l));
                       const std::pair<double, double> pairs[] = {
                           {e.psi3_norm.value, x.psi3_norm.value},
                           {e.psi3_I_norm.value, x.psi3_I_norm.value},
                           {e.einstein_deviation.value, x.einstein_deviation.value},
                           {e.nijenhuis_norm[1].value, x.nijenhuis_norm[1].value}};
                       for (auto [a, b] : pairs) worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(a)));
                       if (e.gh != x.gh) f.push_back("Gray-Hervella classes differ at " + to_string(l));
                     }
                     if (worst > 1e-9) f.push_back("relative difference " + format_root(worst));
                     return "max relative difference " + format_root(worst);
                   }});
  return cases;
}

inline std::vector<SelfTestResult> run_selftest(const SelfTestConfig& cfg = {}) {
  const So7Data& data = cfg.data ? *cfg.data : so7_data();
  detail::CheckContext ctx{data, ReductiveSplit<Rational>(data), ReductiveSplit<double>(data), cfg};
  std::vector<SelfTestResult> out;
  for (const auto& tc : selftest_cases()) {
    SelfTestResult r{tc.name, tc.claim, false, {}, 0};
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> failures;
    try {
      const auto summary = tc.body(ctx, failures);
      r.passed = failures.empty();
      r.detail = failures.empty() ? summary : detail::join_failures(failures);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace twistor
