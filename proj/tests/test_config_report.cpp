#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.h"
#include "phi4lab/cli.h"
#include "phi4lab/config.h"
#include "phi4lab/errors.h"
#include "phi4lab/report.h"

using namespace phi4lab;
namespace fs = std::filesystem;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::vector<const char*> argv = {"phi4lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return rc;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phi4lab-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kUnity = R"([model]
dimension = 1
mass = 1
[grid]
modes = 0
weights = 1
[truncation]
n_max = 8
[chi_b]
kind = indicator
radius = 1
[chi_I]
kind = indicator
radius = 0.5
[quadrature]
nodes = 1
[coupling]
kappa = 0
)";

}  // namespace

TEST_CASE("reference configuration parses") {
  const ModelParams p = fixtures::reference_params();
  CHECK(p.dimension == 1);
  CHECK(p.n_max == 8);
  CHECK(p.kappas.size() == 7);
  CHECK(p.kappas[6] == 0.003125);
  CHECK(p.seed == 20240901);
  CHECK(p.checks.verify_n_max == 12);
}

TEST_CASE("echo round trips") {
  const ModelParams p = fixtures::reference_params();
  CHECK(parse_config_string(echo_config(p)) == p);
  ModelParams q = parse_config_string(kUnity);
  q.chi_b.kind = CutoffKind::gaussian;
  q.chi_b.sigma = 0.1 + 0.2;
  q.epsilon_policy = EpsilonPolicy::fixed;
  q.epsilon = 1.0 / 3.0;
  CHECK(parse_config_string(echo_config(q)) == q);
}

TEST_CASE("errors name the offending field") {
  CHECK(field_of("[model]\nmass = -1\n") == "model.mass");
  CHECK(field_of("[model]\ndimension = 4\n") == "model.dimension");
  CHECK(field_of("[model]\ncolour = red\n") == "model.colour");
  CHECK(field_of("[extras]\nx = 1\n") == "extras");
  CHECK(field_of("[grid]\nK = abc\n") == "grid.K");
  CHECK(field_of("[truncation]\nn_max = 2.5\n") == "truncation.n_max");
  CHECK(field_of("[chi_I]\nscale = -1\n") == "chi_I.scale");
  CHECK(field_of("[chi_b]\nkind = box\n") == "chi_b.kind");
  CHECK(field_of("[coupling]\nkappa = 0.1, -0.2\n") == "coupling.kappa");
  CHECK(field_of("[epsilon]\npolicy = fixed\n") == "epsilon.value");
  CHECK(field_of("[solver]\neig_tol = 0\n") == "solver.eig_tol");
  CHECK(field_of("[quadrature]\nrule = simpson\n") == "quadrature.rule");
  CHECK(field_of("[output]\ndump_vectors = maybe\n") == "output.dump_vectors");
}

TEST_CASE("tabulated cutoff tables resolve against the config directory") {
  const fs::path dir = scratch("table");
  std::ofstream(dir / "chi.tab") << "# k value\n-5 1\n5 1\n";
  std::ofstream(dir / "model.ini") << "[chi_b]\nkind = tabulated\ntable = chi.tab\n";
  const ModelParams p = parse_config_file((dir / "model.ini").string());
  CHECK(p.chi_b.table.size() == 2);
  CHECK(fs::path(p.chi_b.table_path).is_absolute());
}

TEST_CASE("CSV layout") {
  CHECK(csv_text({}) == std::string(kCsvHeader) + "\n");
  SweepRow r;
  r.kappa = 0.1;
  r.E0 = std::nan("");
  const std::string text = csv_text({r});
  CHECK(text.find("\n0.10000000000000001,nan,") != std::string::npos);
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("report JSON round trips") {
  RunRecord rec;
  rec.subcommand = "sweep";
  rec.seed = 7;
  rec.modes = 3;
  rec.n_max = 8;
  rec.basis_dim = 165;
  SweepRow r;
  r.kappa = 0.05;
  r.E0 = 0.5781501329344689;
  r.pullthrough_resid = std::nan("");
  rec.rows = {r};
  CheckOutcome c;
  c.name = "ccr_mixed";
  c.status = CheckStatus::pass;
  c.measured = {1e-16};
  rec.checks = {c};
  const RunRecord back = parse_report_json(report_json_text(rec));
  CHECK(back.subcommand == "sweep");
  CHECK(back.basis_dim == 165);
  REQUIRE(back.rows.size() == 1);
  CHECK(back.rows[0].E0 == r.E0);
  CHECK(std::isnan(back.rows[0].pullthrough_resid));
  CHECK(csv_text(back.rows) == csv_text(rec.rows));
  REQUIRE(back.checks.size() == 1);
  CHECK(back.checks[0].status == CheckStatus::pass);
}

TEST_CASE("info on the reference configuration") {
  std::string text;
  CHECK(cli({"info", "--config", fixtures::reference_config()}, &text) == 0);
  CHECK(text.find("165") != std::string::npos);
}

TEST_CASE("report echoes c_bos for the all-unity model") {
  const fs::path dir = scratch("unity");
  std::ofstream(dir / "unity.ini") << kUnity;
  CHECK(cli({"solve", "--config", (dir / "unity.ini").string(), "--out", (dir / "out").string()}) == 0);
  const RunRecord rec = parse_report_json(slurp(dir / "out" / "report.json"));
  REQUIRE(rec.constants);
  CHECK(rec.constants->hbound.c_bos == doctest::Approx(16.0).epsilon(1e-15));
  REQUIRE(rec.rows.size() == 1);
  CHECK(std::abs(rec.rows[0].E0) < 1e-12);
  CHECK(rec.ok());
}

TEST_CASE("empty coupling list gives a header-only CSV") {
  const fs::path dir = scratch("empty");
  std::string text = kUnity;
  text.replace(text.find("kappa = 0"), 9, "kappa =");
  std::ofstream(dir / "empty.ini") << text;
  cli({"sweep", "--config", (dir / "empty.ini").string(), "--out", (dir / "out").string()});
  CHECK(slurp(dir / "out" / "sweep.csv") == std::string(kCsvHeader) + "\n");
}

TEST_CASE("bad invocations exit with code 2") {
  CHECK(cli({"sweep"}) == 2);
  CHECK(cli({"sweep", "--config", "/nonexistent/x.ini"}) == 2);
  CHECK(cli({"frobnicate"}) == 2);
}
