#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phi4lab/params.h"
#include "phi4lab/verify.h"

namespace phi4lab {

inline constexpr const char* kVersion = "0.1.0";

// CSV column order; one row per SweepRow.
inline constexpr const char* kCsvHeader =
    "kappa,E0,residual,c1_kappa,e_abs,e_over_kappa,rayleigh_bound,paper_bound,n_expect,"
    "c_eps_kappa,overlap,pullthrough_resid,top_grade_weight";

// Everything one CLI run produced.
struct RunRecord {
  std::string subcommand;
  std::string config_echo;
  std::uint64_t seed = 0;
  std::size_t modes = 0;
  int n_max = 0;
  std::size_t basis_dim = 0;
  double min_omega = 0.0;
  double quadrature_truncation_error = 0.0;
  std::optional<TheoryConstants> constants;
  std::optional<double> fit_coefficient;
  std::vector<SweepRow> rows;
  std::vector<CheckOutcome> checks;  // suites and sweep summary
  std::vector<std::string> warnings;
  bool ok() const;
};

// 17 significant digits, "nan"/"inf" for non-finite values.
std::string format_number(double x);

std::string csv_text(const std::vector<SweepRow>& rows);
std::string report_json_text(const RunRecord& record);
RunRecord parse_report_json(const std::string& text);
std::string render_text(const RunRecord& record);

}  // namespace phi4lab
