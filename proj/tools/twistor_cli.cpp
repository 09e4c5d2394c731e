// Command-line front end: single reports, sweeps, special-parameter search
// and the self-test suite.

#include "twistor/emit.hpp"
#include "twistor/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

namespace {

using namespace twistor;

constexpr int kExitOk = 0;
constexpr int kExitIdentityFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string lambda;
  std::string sweep;
  bool log = false;
  bool exact = false;
  double tol = 1e-10;
  std::string format = "table";
  std::string out;
  bool selftest = false;
  bool find_special = false;
  std::uint64_t seed = SelfTestConfig{}.seed;
  bool xi = false, no_xi = false;
  bool dump_structure = false;
  std::string perturb;
};

/// Float parameter: a rational, a decimal, or sqrt(...) of either.
double parse_float_parameter(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
  if (t.rfind("sqrt(", 0) == 0 && t.size() > 6 && t.back() == ')')
    return std::sqrt(parse_rational(t.substr(5, t.size() - 6)).get_d());
  return parse_rational(t).get_d();
}

Rational parse_exact_parameter(const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError("exact mode needs a rational lambda, got '" + text + "'");
  }
}

SweepSpec parse_sweep(const std::string& text, bool log) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--sweep expects start:stop:count");
  SweepSpec sp{parts[0], parts[1], 0, log};
  try {
    const long n = std::stol(parts[2]);
    if (n < 2) throw UsageError("a sweep needs at least 2 points");
    sp.count = static_cast<std::size_t>(n);
  } catch (const std::invalid_argument&) {
    throw UsageError("bad sweep count '" + parts[2] + "'");
  }
  return sp;
}

So7Data parse_perturbation(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() != 4) throw UsageError("--debug-perturb expects i,j,k,delta");
  const int i = std::stoi(parts[0]), j = std::stoi(parts[1]), k = std::stoi(parts[2]);
  for (int v : {i, j, k})
    if (v < 0 || v >= so7::kDim) throw UsageError("structure constant index out of range");
  return so7_data().perturbed(i, j, k, parse_rational(parts[3]));
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::ios_base::failure("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

TorsionReport single_report(const Options& o, bool xi) {
  const AnalysisOptions opt{Tolerance{o.tol}, xi};
  if (o.exact) {
    static const ReductiveSplit<Rational> split(so7_data());
    return analyze(split, parse_exact_parameter(o.lambda), opt);
  }
  static const ReductiveSplit<double> split(so7_data());
  return analyze(split, parse_float_parameter(o.lambda), opt);
}

std::vector<TorsionReport> sweep_reports(const Options& o, const SweepSpec& sp, bool xi) {
  const AnalysisOptions opt{Tolerance{o.tol}, xi};
  validate_sweep(sp, parse_float_parameter(sp.start), parse_float_parameter(sp.stop));
  if (o.exact) {
    if (sp.log) throw UsageError("exact sweeps must be linearly spaced");
    const auto grid = rational_grid(sp);
    const ReductiveSplit<Rational> split(so7_data());
    return parallel_map<TorsionReport>(grid.size(), [&](std::size_t i) { return analyze(split, grid[i], opt); });
  }
  const auto grid = float_grid(sp, parse_float_parameter);
  const ReductiveSplit<double> split(so7_data());
  return parallel_map<TorsionReport>(grid.size(), [&](std::size_t i) { return analyze(split, grid[i], opt); });
}

int run_selftest_mode(const Options& o, std::ostream& os) {
  SelfTestConfig cfg;
  cfg.seed = o.seed;
  cfg.tol = Tolerance{o.tol};
  std::unique_ptr<So7Data> perturbed;
  if (!o.perturb.empty()) {
    perturbed = std::make_unique<So7Data>(parse_perturbation(o.perturb));
    cfg.data = perturbed.get();
  }
  const auto results = run_selftest(cfg);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& r : results)
      arr.push_back(Json{{"name", r.name}, {"claim", r.claim}, {"passed", r.passed}, {"detail", r.detail},
                         {"seconds", r.seconds}});
    os << Json{{"seed", o.seed}, {"passed", ok}, {"checks", arr}}.dump(2) << "\n";
  } else if (o.format == "csv") {
    os << "name,passed,seconds,detail\n";
    for (const auto& r : results)
      os << r.name << "," << (r.passed ? "true" : "false") << "," << r.seconds << ",\"" << r.detail << "\"\n";
  } else {
    os << "self-test (seed " << o.seed << ")\n\n";
    for (const auto& r : results)
      os << "  [" << (r.passed ? "PASS" : "FAIL") << "] " << std::left << std::setw(24) << r.name << std::setw(8)
         << std::fixed << std::setprecision(2) << r.seconds << std::defaultfloat << r.claim << "\n"
         << std::setw(36) << "" << r.detail << "\n";
    os << "\n" << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  }
  return ok ? kExitOk : kExitIdentityFailure;
}

int run_dump_structure(std::ostream& os) {
  Json constants = Json::array();
  for (const auto& [i, j, k, c] : so7_data().nonzero_constants())
    constants.push_back(Json{{"i", i}, {"j", j}, {"k", k}, {"c", to_string(c)}});
  Json labels = Json::array();
  for (int i = 0; i < so7::kDim; ++i) labels.push_back(so7::kLabels[i]);
  os << Json{{"basis", labels}, {"structure_constants", constants}}.dump(2) << "\n";
  return kExitOk;
}

int run(const Options& o) {
  if (o.format != "table" && o.format != "json" && o.format != "csv")
    throw UsageError("--format must be table, json or csv");
  if (!(o.tol > 0)) throw UsageError("--tol must be positive");
  const int modes = !o.lambda.empty() + !o.sweep.empty() + o.selftest + o.dump_structure;
  if (modes != 1 && !(o.find_special && modes == 0))
    throw UsageError("choose exactly one of --lambda, --sweep, --selftest, --find-special, --dump-structure");
  if (o.find_special && (!o.lambda.empty() || o.selftest || o.dump_structure))
    throw UsageError("--find-special combines only with --sweep");
  if (o.xi && o.no_xi) throw UsageError("--xi and --no-xi are exclusive");

  Output out(o.out);
  auto& os = out.stream();
  int code = kExitOk;

  if (o.dump_structure) {
    code = run_dump_structure(os);
  } else if (o.selftest) {
    code = run_selftest_mode(o, os);
  } else if (!o.lambda.empty()) {
    const auto r = single_report(o, !o.no_xi);
    if (o.format == "json")
      os << to_json(r).dump(2) << "\n";
    else if (o.format == "csv")
      write_csv(os, {r});
    else
      write_table(os, r);
    if (!r.all_checks_pass()) {
      for (const auto& c : r.checks)
        if (!c.passed) std::cerr << "identity check failed: " << c.name << " " << c.detail << "\n";
      code = kExitIdentityFailure;
    }
  } else {
    const auto sp = parse_sweep(o.sweep.empty() ? "0.25:2.5:100" : o.sweep, o.log);
    const auto reports = sweep_reports(o, sp, o.xi);
    const auto crossings = find_crossings(reports, o.tol, sp.count > 2);
    const auto loci = summarize_loci(crossings);
    if (o.find_special) {
      if (o.format == "json") {
        os << to_json(crossings, loci).dump(2) << "\n";
      } else {
        if (o.format == "csv") os << "locus,condition,lambda\n";
        for (const auto& l : loci)
          for (double x : l.roots)
            os << (o.format == "csv" ? l.name + "," + l.condition + "," : l.name + " (" + l.condition + "): ")
               << format_double(x) << "\n";
      }
    } else if (o.format == "json") {
      Json arr = Json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      Json summary = to_json(crossings, loci);
      os << Json{{"reports", arr}, {"crossings", summary["crossings"]}, {"loci", summary["loci"]}}.dump(2) << "\n";
    } else if (o.format == "csv") {
      write_csv(os, reports);
      for (const auto& l : loci) {
        std::cerr << l.name << " (" << l.condition << "): " << l.roots.size() << " crossing(s)";
        for (double x : l.roots) std::cerr << " " << format_double(x);
        std::cerr << "\n";
      }
    } else {
      write_sweep_table(os, reports, loci);
    }
    for (const auto& r : reports)
      if (!r.all_checks_pass()) {
        std::cerr << "identity checks failed at lambda = " << r.lambda_text << "\n";
        code = kExitIdentityFailure;
      }
  }
  out.finish();
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Invariant almost quaternion-Hermitian structures on SO(7)/U(3)"};
  app.add_option("--lambda", o.lambda, "parameter: p/q, decimal, or sqrt(p/q) in float mode");
  app.add_option("--sweep", o.sweep, "sweep start:stop:count");
  app.add_flag("--log", o.log, "logarithmically spaced sweep");
  app.add_flag("--exact", o.exact, "exact rational arithmetic");
  app.add_option("--tol", o.tol, "absolute tolerance for float zero tests")->capture_default_str();
  app.add_option("--format", o.format, "table, json or csv")->capture_default_str();
  app.add_option("--out", o.out, "write output to this file");
  app.add_flag("--selftest", o.selftest, "run the identity self-test suite");
  app.add_flag("--find-special", o.find_special, "locate the special parameters along a sweep");
  app.add_option("--seed", o.seed, "seed for the self-test sampler")->capture_default_str();
  app.add_flag("--xi", o.xi, "solve for Q^u(3) at every sweep point");
  app.add_flag("--no-xi", o.no_xi, "skip the Q^u(3) solve for single reports");
  app.add_flag("--dump-structure", o.dump_structure, "print the so(7) structure constants as JSON");
  app.add_option("--debug-perturb", o.perturb, "self-test with one structure constant shifted: i,j,k,delta")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  try {
    return run(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIdentityFailure;
  }
}
