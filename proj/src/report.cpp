#include "phi4lab/report.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "phi4lab/errors.h"

namespace phi4lab {

namespace {

using nlohmann::json;

// nlohmann writes NaN as null; keep non-finite values as strings so they survive.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw FormatError("report: expected a number, got " + j.dump());
}

json check_json(const CheckOutcome& c) {
  json m = json::array();
  for (double x : c.measured) m.push_back(num(x));
  return {{"name", c.name},   {"status", to_string(c.status)}, {"measured", m},
          {"threshold", num(c.threshold)}, {"slack", num(c.slack)}, {"context", c.context}};
}

CheckOutcome check_from(const json& j) {
  CheckOutcome c;
  c.name = j.at("name").get<std::string>();
  const std::string s = j.at("status").get<std::string>();
  if (s == "pass")
    c.status = CheckStatus::pass;
  else if (s == "pass_with_caveat")
    c.status = CheckStatus::pass_with_caveat;
  else if (s == "fail")
    c.status = CheckStatus::fail;
  else if (s == "skipped")
    c.status = CheckStatus::skipped;
  else
    throw FormatError("report: unknown check status '" + s + "'");
  for (const auto& x : j.at("measured")) c.measured.push_back(get_num(x));
  c.threshold = get_num(j.at("threshold"));
  c.slack = get_num(j.at("slack"));
  c.context = j.at("context").get<std::string>();
  return c;
}

// Field table shared by the CSV writer and the JSON reader/writer.
struct Column {
  const char* name;
  double SweepRow::*field;
};
constexpr Column kColumns[] = {
    {"kappa", &SweepRow::kappa},
    {"E0", &SweepRow::E0},
    {"residual", &SweepRow::residual},
    {"c1_kappa", &SweepRow::c1_kappa},
    {"e_abs", &SweepRow::e_abs},
    {"e_over_kappa", &SweepRow::e_over_kappa},
    {"rayleigh_bound", &SweepRow::rayleigh_bound},
    {"paper_bound", &SweepRow::paper_bound},
    {"n_expect", &SweepRow::n_expect},
    {"c_eps_kappa", &SweepRow::c_eps_kappa},
    {"overlap", &SweepRow::overlap},
    {"pullthrough_resid", &SweepRow::pullthrough_resid},
    {"top_grade_weight", &SweepRow::top_grade_weight},
};

json constants_json(const TheoryConstants& t) {
  json j = {{"c1", num(t.c1)},
            {"c_bos", num(t.hbound.c_bos)},
            {"d_bos", num(t.hbound.d_bos)},
            {"chi_I_L1", num(t.chiI_L1)},
            {"norm_chi_b", num(t.norm_chi_b)},
            {"norm_chi_b_over_sqrt_omega", num(t.norm_chi_b_sqrt_omega)},
            {"norm_chi_b_over_omega", num(t.norm_chi_b_omega)},
            {"norm_chi_b_over_omega_3_2", num(t.norm_chi_b_omega32)}};
  if (t.lemma) {
    j["nu0"] = num(t.lemma->nu0);
    j["a"] = num(t.lemma->a);
    j["b"] = num(t.lemma->b);
  }
  return j;
}

TheoryConstants constants_from(const json& j) {
  TheoryConstants t;
  t.c1 = get_num(j.at("c1"));
  t.hbound.c_bos = get_num(j.at("c_bos"));
  t.hbound.d_bos = get_num(j.at("d_bos"));
  t.chiI_L1 = get_num(j.at("chi_I_L1"));
  t.norm_chi_b = get_num(j.at("norm_chi_b"));
  t.norm_chi_b_sqrt_omega = get_num(j.at("norm_chi_b_over_sqrt_omega"));
  t.norm_chi_b_omega = get_num(j.at("norm_chi_b_over_omega"));
  t.norm_chi_b_omega32 = get_num(j.at("norm_chi_b_over_omega_3_2"));
  if (j.contains("nu0")) t.lemma = Lemma31Constants{get_num(j.at("nu0")), get_num(j.at("a")), get_num(j.at("b"))};
  return t;
}

const char* mark(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::pass_with_caveat: return "PASS*";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::skipped: return "SKIP";
  }
  return "?";
}

void render_check(std::ostream& out, const CheckOutcome& c, const std::string& indent) {
  out << indent << mark(c.status) << "  " << c.name;
  if (c.status != CheckStatus::skipped) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  worst=%.3e  threshold=%.3e  slack=%.3e", c.worst(), c.threshold, c.slack);
    out << buf;
  }
  if (!c.context.empty()) out << "  (" << c.context << ")";
  out << "\n";
}

}  // namespace

bool RunRecord::ok() const {
  if (!all_ok(checks)) return false;
  for (const auto& r : rows)
    if (r.degraded || !all_ok(r.checks)) return false;
  return true;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_text(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    bool first = true;
    for (const auto& col : kColumns) {
      if (!first) out += ",";
      out += format_number(r.*(col.field));
      first = false;
    }
    out += "\n";
  }
  return out;
}

std::string report_json_text(const RunRecord& rec) {
  json j;
  j["program"] = "phi4lab";
  j["version"] = kVersion;
  j["subcommand"] = rec.subcommand;
  j["seed"] = rec.seed;
  j["config"] = rec.config_echo;
  j["basis"] = {{"modes", rec.modes}, {"n_max", rec.n_max}, {"dim", rec.basis_dim}};
  j["min_omega"] = num(rec.min_omega);
  j["quadrature_truncation_error"] = num(rec.quadrature_truncation_error);
  if (rec.constants) j["constants"] = constants_json(*rec.constants);
  if (rec.fit_coefficient) j["fit_coefficient"] = num(*rec.fit_coefficient);
  j["csv_columns"] = kCsvHeader;
  json rows = json::array();
  for (const auto& r : rec.rows) {
    json row;
    for (const auto& col : kColumns) row[col.name] = num(r.*(col.field));
    row["epsilon"] = num(r.epsilon);
    row["psi_tilde_norm"] = num(r.psi_tilde_norm);
    row["degraded"] = r.degraded;
    row["error"] = r.error;
    row["warnings"] = r.warnings;
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    row["checks"] = checks;
    rows.push_back(row);
  }
  j["rows"] = rows;
  json checks = json::array();
  for (const auto& c : rec.checks) checks.push_back(check_json(c));
  j["checks"] = checks;
  j["warnings"] = rec.warnings;
  j["status"] = rec.ok() ? "pass" : "fail";
  return j.dump(2) + "\n";
}

RunRecord parse_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  try {
    RunRecord rec;
    rec.subcommand = j.at("subcommand").get<std::string>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.config_echo = j.at("config").get<std::string>();
    rec.modes = j.at("basis").at("modes").get<std::size_t>();
    rec.n_max = j.at("basis").at("n_max").get<int>();
    rec.basis_dim = j.at("basis").at("dim").get<std::size_t>();
    rec.min_omega = get_num(j.at("min_omega"));
    rec.quadrature_truncation_error = get_num(j.at("quadrature_truncation_error"));
    if (j.contains("constants")) rec.constants = constants_from(j.at("constants"));
    if (j.contains("fit_coefficient")) rec.fit_coefficient = get_num(j.at("fit_coefficient"));
    for (const auto& row : j.at("rows")) {
      SweepRow r;
      for (const auto& col : kColumns) r.*(col.field) = get_num(row.at(col.name));
      r.epsilon = get_num(row.at("epsilon"));
      r.psi_tilde_norm = get_num(row.at("psi_tilde_norm"));
      r.degraded = row.at("degraded").get<bool>();
      r.error = row.at("error").get<std::string>();
      r.warnings = row.at("warnings").get<std::vector<std::string>>();
      for (const auto& c : row.at("checks")) r.checks.push_back(check_from(c));
      rec.rows.push_back(std::move(r));
    }
    for (const auto& c : j.at("checks")) rec.checks.push_back(check_from(c));
    rec.warnings = j.at("warnings").get<std::vector<std::string>>();
    return rec;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::string render_text(const RunRecord& rec) {
  std::ostringstream out;
  out << "phi4lab " << kVersion << "  " << rec.subcommand << "  seed=" << rec.seed << "\n";
  out << "basis: M=" << rec.modes << " N_max=" << rec.n_max << " dim=" << rec.basis_dim
      << "  min omega=" << format_number(rec.min_omega) << "\n";
  if (rec.constants) {
    const auto& t = *rec.constants;
    out << "c1=" << format_number(t.c1) << "  c_bos=" << format_number(t.hbound.c_bos)
        << "  d_bos=" << format_number(t.hbound.d_bos) << "  ||chi_I||_1=" << format_number(t.chiI_L1) << "\n";
    out << "||chi_b||=" << format_number(t.norm_chi_b) << "  ||chi_b/omega^(1/2)||=" << format_number(t.norm_chi_b_sqrt_omega)
        << "  ||chi_b/omega||=" << format_number(t.norm_chi_b_omega)
        << "  ||chi_b/omega^(3/2)||=" << format_number(t.norm_chi_b_omega32) << "\n";
    if (t.lemma)
      out << "nu0=" << format_number(t.lemma->nu0) << "  a=" << format_number(t.lemma->a)
          << "  b=" << format_number(t.lemma->b) << "\n";
  }
  if (rec.fit_coefficient) out << "quadratic fit C=" << format_number(*rec.fit_coefficient) << "\n";
  if (!rec.rows.empty()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "\n%-12s %-14s %-10s %-12s %-12s %-12s %-10s %-10s %-10s\n", "kappa", "E0",
                  "residual", "e/kappa", "rayleigh", "<N>", "overlap", "pullthru", "top_wt");
    out << buf;
    for (const auto& r : rec.rows) {
      std::snprintf(buf, sizeof buf, "%-12.6g %-14.9g %-10.2e %-12.6g %-12.6g %-12.6g %-10.6f %-10.2e %-10.2e\n",
                    r.kappa, r.E0, r.residual, r.e_over_kappa, r.rayleigh_bound, r.n_expect, r.overlap,
                    r.pullthrough_resid, r.top_grade_weight);
      out << buf;
    }
    for (const auto& r : rec.rows) {
      out << "\nkappa=" << format_number(r.kappa) << (r.degraded ? "  [degraded]" : "") << "\n";
      if (!r.error.empty()) out << "  error: " << r.error << "\n";
      for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
      for (const auto& c : r.checks) render_check(out, c, "  ");
    }
  }
  if (!rec.checks.empty()) {
    out << "\nchecks:\n";
    for (const auto& c : rec.checks) render_check(out, c, "  ");
  }
  for (const auto& w : rec.warnings) out << "warning: " << w << "\n";
  out << "\nstatus: " << (rec.ok() ? "pass" : "fail") << "\n";
  return out.str();
}

}  // namespace phi4lab
