#include "twistor/emit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace twistor;

namespace {

const ReductiveSplit<Rational>& exact_split() {
  static const ReductiveSplit<Rational> split(so7_data());
  return split;
}

const ReductiveSplit<double>& float_split() {
  static const ReductiveSplit<double> split(so7_data());
  return split;
}

const TorsionReport& exact_report(int num, int den) {
  static std::map<std::pair<int, int>, TorsionReport> cache;
  auto it = cache.find({num, den});
  if (it == cache.end()) it = cache.emplace(std::pair{num, den}, analyze(exact_split(), Rational(num, den))).first;
  return it->second;
}

std::vector<TorsionReport> float_sweep(double a, double b, std::size_t n) {
  const SweepSpec sp{std::to_string(a), std::to_string(b), n, false};
  const auto grid = float_grid(sp, [](const std::string& t) { return std::stod(t); });
  return parallel_map<TorsionReport>(grid.size(), [&](std::size_t i) {
    return analyze(float_split(), grid[i], AnalysisOptions{Tolerance{1e-10}, false});
  });
}

}  // namespace

TEST(Analyze, AllIdentityChecksPassExactly) {
  for (auto [p, q] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{7, 5}}) {
    const auto& r = exact_report(p, q);
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << p << "/" << q << " " << c.name << " " << c.detail;
    EXPECT_EQ(r.checks.size(), 20u);
  }
}

// |Phi|^2 = 12 / (lambda^2 mu) = 12 / lambda on the normalized family, and
// psi3 = (4 lambda + mu)/12 Phi.
TEST(Analyze, ExactNormsAtLambdaOne) {
  const auto& r = exact_report(1, 1);
  EXPECT_EQ(r.psi3_norm.exact, "sqrt(25/12)");
  EXPECT_EQ(r.psi3_I_norm.exact, "sqrt(1/12)");
  EXPECT_EQ(r.contractions_max.exact, "0");
  EXPECT_EQ(r.nijenhuis_norm[0].exact, "0");
  EXPECT_EQ(r.gh[0], std::vector<std::string>{"W3"});
  EXPECT_EQ(r.gh[1], (std::vector<std::string>{"W1", "W3"}));
  EXPECT_FALSE(r.kahler);
  EXPECT_FALSE(r.einstein);
  EXPECT_DOUBLE_EQ(r.nijenhuis_constant, -1.0);
  EXPECT_EQ(r.xi.invariant_dim.value(), 4u);
  EXPECT_TRUE(r.xi.member.value());
  EXPECT_EQ(r.xi.sp1_scale, "1/2");
}

TEST(Analyze, LambdaHalfIsKahlerAndEinstein) {
  const auto& r = exact_report(1, 2);
  EXPECT_TRUE(r.kahler);
  EXPECT_TRUE(r.einstein);
  EXPECT_FALSE(r.eh_zero);
  EXPECT_EQ(r.einstein_deviation.exact, "0");
  EXPECT_EQ(r.psi3_norm.exact, "sqrt(8/3)");
  EXPECT_TRUE(r.gh[0].empty());
}

TEST(Analyze, IndicatorsFollowTheirClosedForms) {
  for (auto [p, q] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{7, 5}}) {
    const auto& r = exact_report(p, q);
    const double l = static_cast<double>(p) / q, m = 1 / l;
    EXPECT_NEAR(r.indicators.eh_component, (m - 2 * l) / 12, 1e-14);
    EXPECT_NEAR(r.indicators.kahler, m / 2 - 2 * l, 1e-14);
    EXPECT_NEAR(r.indicators.j_w3, (4 * l - 3 * m) * 3 * l / 8, 1e-14);
  }
}

TEST(Analyze, FloatAgreesWithExact) {
  const auto& e = exact_report(7, 5);
  const auto f = analyze(float_split(), 1.4, AnalysisOptions{Tolerance{1e-10}, false});
  EXPECT_TRUE(f.all_checks_pass());
  EXPECT_NEAR(f.psi3_norm.value, e.psi3_norm.value, 1e-12);
  EXPECT_NEAR(f.nijenhuis_norm[1].value, e.nijenhuis_norm[1].value, 1e-10);
  EXPECT_NEAR(f.einstein_deviation.value, e.einstein_deviation.value, 1e-10);
  EXPECT_EQ(f.gh, e.gh);
}

TEST(Analyze, RejectsNonPositiveLambda) {
  EXPECT_THROW(analyze(exact_split(), Rational(0)), DomainError);
  EXPECT_THROW(analyze(float_split(), -0.25), DomainError);
}

TEST(Sweep, FindsEachSpecialParameterExactlyOnce) {
  const auto reports = float_sweep(0.25, 2.5, 100);
  const auto loci = summarize_loci(find_crossings(reports, 1e-10, true));
  const std::map<std::string, double> want{{"eh_zero", 1 / std::sqrt(2.0)},
                                           {"kahler", 0.5},
                                           {"einstein", std::sqrt(3.0 / 8.0)},
                                           {"j_pure_w1", std::sqrt(3.0) / 2}};
  ASSERT_EQ(loci.size(), 4u);
  for (const auto& l : loci) {
    ASSERT_EQ(l.roots.size(), 1u) << l.name;
    EXPECT_NEAR(l.roots[0], want.at(l.name), 1e-8) << l.name;
  }
}

TEST(Sweep, TwoPointSweepHasNoRefinementButStillBrackets) {
  const auto reports = float_sweep(0.4, 0.6, 2);
  const auto crossings = find_crossings(reports, 1e-10, false);
  bool kahler = false;
  for (const auto& c : crossings)
    if (c.indicator == IndicatorKind::Kahler) {
      kahler = true;
      EXPECT_DOUBLE_EQ(c.lambda, 0.5);
      EXPECT_FALSE(c.on_grid);
    }
  EXPECT_TRUE(kahler);
}

TEST(Sweep, GridPointOnARootCountsOnce) {
  const auto r = analyze(exact_split(), Rational(1, 2), AnalysisOptions{{}, false});
  const auto before = analyze(exact_split(), Rational(2, 5), AnalysisOptions{{}, false});
  const auto after = analyze(exact_split(), Rational(3, 5), AnalysisOptions{{}, false});
  int kahler = 0;
  for (const auto& c : find_crossings({before, r, after}, 1e-10, false))
    if (c.indicator == IndicatorKind::Kahler) {
      ++kahler;
      EXPECT_TRUE(c.on_grid);
      EXPECT_EQ(c.index, 1u);
    }
  EXPECT_EQ(kahler, 1);
}

TEST(Sweep, GridsAndValidation) {
  const auto g = rational_grid(SweepSpec{"1/2", "1", 3, false});
  EXPECT_EQ(g, (std::vector<Rational>{Rational(1, 2), Rational(3, 4), Rational(1)}));
  EXPECT_THROW(rational_grid(SweepSpec{"1", "2", 3, true}), DomainError);
  const auto lg = float_grid(SweepSpec{"0.1", "10", 3, true}, [](const std::string& t) { return std::stod(t); });
  EXPECT_DOUBLE_EQ(lg[0], 0.1);
  EXPECT_NEAR(lg[1], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(lg[2], 10.0);
  EXPECT_THROW(validate_sweep(SweepSpec{"0", "1", 3, false}, 0, 1), DomainError);
  EXPECT_THROW(validate_sweep(SweepSpec{"1", "2", 1, false}, 1, 2), DomainError);
  EXPECT_THROW(validate_sweep(SweepSpec{"2", "1", 3, false}, 2, 1), DomainError);
}

TEST(Bisect, ConvergesOnASimpleRoot) {
  EXPECT_NEAR(bisect([](double x) { return x * x - 2; }, 1, 2), std::sqrt(2.0), 1e-15);
}

TEST(ParallelMap, PreservesIndexOrder) {
  const auto v = parallel_map<std::size_t>(37, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
}

TEST(Emit, JsonRoundTripPreservesTheReport) {
  for (const TorsionReport* r : {&exact_report(1, 1), &exact_report(7, 5)}) {
    const auto j = to_json(*r);
    const auto back = report_from_json(Json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
  }
  const auto f = analyze(float_split(), 0.8, AnalysisOptions{Tolerance{1e-10}, false});
  EXPECT_EQ(to_json(report_from_json(to_json(f))), to_json(f));
}

TEST(Emit, ExactJsonWritesNormsAsStrings) {
  const auto j = to_json(exact_report(1, 1));
  EXPECT_TRUE(j["lambda"].is_string());
  EXPECT_TRUE(j["psi3_norm"].is_string());
  EXPECT_TRUE(j["einstein_deviation"].is_string());
  EXPECT_TRUE(j["nijenhuis"]["NJ_norm"].is_string());
  EXPECT_EQ(j["gh_I"], Json::array({"W3"}));
}

TEST(Emit, CsvHasHeaderAndOneRowPerReport) {
  std::ostringstream os;
  write_csv(os, {exact_report(1, 1), exact_report(1, 2)});
  std::istringstream in(os.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].rfind("lambda,mu,psi3_norm,", 0), 0u);
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 15);
  EXPECT_EQ(lines[2].rfind("1/2,2,sqrt(8/3),", 0), 0u);
}

TEST(Emit, TableMentionsEveryCheck) {
  std::ostringstream os;
  write_table(os, exact_report(1, 2));
  const auto text = os.str();
  for (const auto& c : exact_report(1, 2).checks) EXPECT_NE(text.find(c.name), std::string::npos) << c.name;
  EXPECT_NE(text.find("Kahler yes"), std::string::npos);
}
