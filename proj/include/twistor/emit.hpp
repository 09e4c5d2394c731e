#pragma once

#include "report.hpp"

#include <json.hpp>

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace twistor {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"lambda",  "mu",      "psi3_norm", "psi3_I_norm", "contractions_max",
                                             "gh_I",    "gh_J",    "gh_K",      "NI_norm",     "NJ_norm",
                                             "NK_norm", "einstein_deviation",   "kahler",      "eh_zero",
                                             "quaternionic", "einstein"};
  return cols;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

namespace detail {

inline Json quantity_json(const Quantity& q, bool exact) {
  if (exact) return q.exact;
  return q.value;
}

inline std::string quantity_text(const Quantity& q, bool exact) { return exact ? q.exact : format_double(q.value); }

inline std::string gh_text(const std::vector<std::string>& classes) {
  if (classes.empty()) return "none";
  std::string out;
  for (const auto& c : classes) out += (out.empty() ? "" : "+") + c;
  return out;
}

inline Quantity quantity_from_json(const Json& j) {
  Quantity q;
  if (j.is_string()) {
    q.exact = j.get<std::string>();
    const auto& t = q.exact;
    if (t.rfind("sqrt(", 0) == 0 && t.back() == ')') {
      q.value = std::sqrt(parse_rational(t.substr(5, t.size() - 6)).get_d());
    } else {
      q.value = parse_rational(t).get_d();
    }
  } else {
    q.value = j.get<double>();
  }
  return q;
}

}  // namespace detail

inline Json to_json(const TorsionReport& r) {
  const bool ex = r.exact;
  Json j;
  if (ex) {
    j["lambda"] = r.lambda_text;
    j["mu"] = r.mu_text;
  } else {
    j["lambda"] = r.lambda;
    j["mu"] = r.mu;
  }
  j["psi3_norm"] = detail::quantity_json(r.psi3_norm, ex);
  j["psi3_I_norm"] = detail::quantity_json(r.psi3_I_norm, ex);
  j["psi3_J_norm"] = detail::quantity_json(r.psi3_J_norm, ex);
  j["psi3_K_norm"] = detail::quantity_json(r.psi3_K_norm, ex);
  j["contractions_max"] = detail::quantity_json(r.contractions_max, ex);
  j["gh_I"] = r.gh[0];
  j["gh_J"] = r.gh[1];
  j["gh_K"] = r.gh[2];
  j["nijenhuis"] = Json{{"NI_norm", detail::quantity_json(r.nijenhuis_norm[0], ex)},
                        {"NJ_norm", detail::quantity_json(r.nijenhuis_norm[1], ex)},
                        {"NK_norm", detail::quantity_json(r.nijenhuis_norm[2], ex)},
                        {"constant", r.nijenhuis_constant}};
  j["einstein_deviation"] = detail::quantity_json(r.einstein_deviation, ex);
  j["flags"] = Json{{"kahler", r.kahler},
                    {"eh_zero", r.eh_zero},
                    {"quaternionic", r.quaternionic},
                    {"einstein", r.einstein},
                    {"j_pure_w1", r.j_pure_w1}};
  j["indicators"] = Json{{"eh_component", r.indicators.eh_component},
                         {"kahler", r.indicators.kahler},
                         {"einstein", r.indicators.einstein},
                         {"j_w3", r.indicators.j_w3}};
  Json xi{{"skew", r.xi.skew},
          {"preserves_quaternions", r.xi.preserves_quaternions},
          {"orthogonal_to_sp1", r.xi.orthogonal_to_sp1},
          {"sp1_coefficient", r.xi.sp1_scale}};
  if (r.xi.invariant_dim) xi["invariant_dim"] = *r.xi.invariant_dim;
  if (r.xi.member) xi["member"] = *r.xi.member;
  if (r.xi.membership_residual) xi["membership_residual"] = *r.xi.membership_residual;
  j["xi"] = xi;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  return j;
}

/// Inverse of to_json for the fields it writes.
inline TorsionReport report_from_json(const Json& j) {
  TorsionReport r;
  r.exact = j.at("lambda").is_string();
  if (r.exact) {
    r.lambda_text = j.at("lambda").get<std::string>();
    r.mu_text = j.at("mu").get<std::string>();
    r.lambda = parse_rational(r.lambda_text).get_d();
    r.mu = parse_rational(r.mu_text).get_d();
  } else {
    r.lambda = j.at("lambda").get<double>();
    r.mu = j.at("mu").get<double>();
    r.lambda_text = format_double(r.lambda);
    r.mu_text = format_double(r.mu);
  }
  r.psi3_norm = detail::quantity_from_json(j.at("psi3_norm"));
  r.psi3_I_norm = detail::quantity_from_json(j.at("psi3_I_norm"));
  r.psi3_J_norm = detail::quantity_from_json(j.at("psi3_J_norm"));
  r.psi3_K_norm = detail::quantity_from_json(j.at("psi3_K_norm"));
  r.contractions_max = detail::quantity_from_json(j.at("contractions_max"));
  r.gh = {j.at("gh_I").get<std::vector<std::string>>(), j.at("gh_J").get<std::vector<std::string>>(),
          j.at("gh_K").get<std::vector<std::string>>()};
  const auto& n = j.at("nijenhuis");
  r.nijenhuis_norm = {detail::quantity_from_json(n.at("NI_norm")), detail::quantity_from_json(n.at("NJ_norm")),
                      detail::quantity_from_json(n.at("NK_norm"))};
  r.nijenhuis_constant = n.at("constant").get<double>();
  r.einstein_deviation = detail::quantity_from_json(j.at("einstein_deviation"));
  const auto& f = j.at("flags");
  r.kahler = f.at("kahler").get<bool>();
  r.eh_zero = f.at("eh_zero").get<bool>();
  r.quaternionic = f.at("quaternionic").get<bool>();
  r.einstein = f.at("einstein").get<bool>();
  r.j_pure_w1 = f.at("j_pure_w1").get<bool>();
  const auto& ind = j.at("indicators");
  r.indicators = {ind.at("eh_component").get<double>(), ind.at("kahler").get<double>(),
                  ind.at("einstein").get<double>(), ind.at("j_w3").get<double>()};
  const auto& xi = j.at("xi");
  r.xi.skew = xi.at("skew").get<bool>();
  r.xi.preserves_quaternions = xi.at("preserves_quaternions").get<bool>();
  r.xi.orthogonal_to_sp1 = xi.at("orthogonal_to_sp1").get<bool>();
  r.xi.sp1_scale = xi.at("sp1_coefficient").get<std::string>();
  if (xi.contains("invariant_dim")) r.xi.invariant_dim = xi.at("invariant_dim").get<std::size_t>();
  if (xi.contains("member")) r.xi.member = xi.at("member").get<bool>();
  if (xi.contains("membership_residual")) r.xi.membership_residual = xi.at("membership_residual").get<double>();
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
  return r;
}

inline Json to_json(const std::vector<Crossing>& crossings, const std::vector<LocusSummary>& loci) {
  Json cs = Json::array();
  for (const auto& c : crossings)
    cs.push_back(Json{{"indicator", indicator_name(c.indicator)}, {"on_grid", c.on_grid}, {"lambda", c.lambda}});
  Json ls = Json::array();
  for (const auto& l : loci) ls.push_back(Json{{"locus", l.name}, {"condition", l.condition}, {"roots", l.roots}});
  return Json{{"crossings", cs}, {"loci", ls}};
}

inline std::vector<std::string> csv_row(const TorsionReport& r) {
  const bool ex = r.exact;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {ex ? r.lambda_text : format_double(r.lambda),
          ex ? r.mu_text : format_double(r.mu),
          detail::quantity_text(r.psi3_norm, ex),
          detail::quantity_text(r.psi3_I_norm, ex),
          detail::quantity_text(r.contractions_max, ex),
          detail::gh_text(r.gh[0]),
          detail::gh_text(r.gh[1]),
          detail::gh_text(r.gh[2]),
          detail::quantity_text(r.nijenhuis_norm[0], ex),
          detail::quantity_text(r.nijenhuis_norm[1], ex),
          detail::quantity_text(r.nijenhuis_norm[2], ex),
          detail::quantity_text(r.einstein_deviation, ex),
          b(r.kahler),
          b(r.eh_zero),
          b(r.quaternionic),
          b(r.einstein)};
}

inline void write_csv(std::ostream& os, const std::vector<TorsionReport>& reports) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(csv_columns());
  for (const auto& r : reports) line(csv_row(r));
}

inline void write_table(std::ostream& os, const TorsionReport& r) {
  const bool ex = r.exact;
  auto q = [&](const Quantity& v) { return detail::quantity_text(v, ex); };
  auto yn = [](bool v) { return v ? "yes" : "no"; };
  os << "lambda = " << (ex ? r.lambda_text : format_double(r.lambda)) << ", mu = "
     << (ex ? r.mu_text : format_double(r.mu)) << (ex ? "  (exact)" : "  (float)") << "\n\n";
  os << "  |psi3|            " << q(r.psi3_norm) << "\n";
  os << "  |psi3_I|          " << q(r.psi3_I_norm) << "\n";
  os << "  |psi3_J|, |psi3_K| " << q(r.psi3_J_norm) << ", " << q(r.psi3_K_norm) << "\n";
  os << "  max |L_A beta_B|  " << q(r.contractions_max) << "\n";
  os << "  Gray-Hervella     I: " << detail::gh_text(r.gh[0]) << "   J: " << detail::gh_text(r.gh[1])
     << "   K: " << detail::gh_text(r.gh[2]) << "\n";
  os << "  |N_I|, |N_J|, |N_K| " << q(r.nijenhuis_norm[0]) << ", " << q(r.nijenhuis_norm[1]) << ", "
     << q(r.nijenhuis_norm[2]) << "\n";
  os << "  Nijenhuis constant " << format_double(r.nijenhuis_constant) << "\n";
  os << "  Einstein deviation " << q(r.einstein_deviation) << "\n";
  if (r.xi.invariant_dim)
    os << "  dim Q^u(3)        " << *r.xi.invariant_dim << ", xi member: " << yn(r.xi.member.value_or(false)) << "\n";
  os << "\n  Kahler " << yn(r.kahler) << ", EH component zero " << yn(r.eh_zero) << ", quaternionic "
     << yn(r.quaternionic) << ", Einstein " << yn(r.einstein) << ", J/K pure W1 " << yn(r.j_pure_w1) << "\n\n";
  for (const auto& c : r.checks)
    os << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")")
       << "\n";
}

inline void write_sweep_table(std::ostream& os, const std::vector<TorsionReport>& reports,
                              const std::vector<LocusSummary>& loci) {
  os << std::left << std::setw(14) << "lambda" << std::setw(14) << "|psi3|" << std::setw(14) << "|psi3_I|"
     << std::setw(12) << "GH(I)" << std::setw(10) << "GH(J)" << std::setw(14) << "einstein_dev" << "checks\n";
  for (const auto& r : reports) {
    os << std::setw(14) << (r.exact ? r.lambda_text : format_double(r.lambda).substr(0, 12)) << std::setw(14)
       << std::setprecision(6) << r.psi3_norm.value << std::setw(14) << r.psi3_I_norm.value << std::setw(12)
       << detail::gh_text(r.gh[0]) << std::setw(10) << detail::gh_text(r.gh[1]) << std::setw(14)
       << r.einstein_deviation.value << (r.all_checks_pass() ? "ok" : "FAIL") << "\n";
  }
  os << "\nspecial loci:\n";
  for (const auto& l : loci) {
    os << "  " << std::setw(10) << l.name << " (" << l.condition << "): " << l.roots.size() << " crossing"
       << (l.roots.size() == 1 ? "" : "s");
    for (double x : l.roots) os << "  " << std::setprecision(12) << x;
    os << "\n";
  }
}

}  // namespace twistor
