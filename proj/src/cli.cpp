#include "phi4lab/cli.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "phi4lab/config.h"
#include "phi4lab/errors.h"
#include "phi4lab/report.h"

namespace phi4lab {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

void write_vector(const fs::path& path, const FockBasis& basis, const FockVector& v) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  write_fock_vector_binary(f, basis, v);
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

RunRecord base_record(const std::string& sub, const ModelParams& p, const Model& m) {
  RunRecord rec;
  rec.subcommand = sub;
  rec.config_echo = echo_config(p);
  rec.seed = p.seed;
  rec.modes = m.b().modes();
  rec.n_max = m.b().n_max();
  rec.basis_dim = m.b().dim();
  rec.min_omega = m.g().min_omega();
  rec.quadrature_truncation_error = m.q().truncation_error();
  return rec;
}

int finish(const RunRecord& rec, const fs::path& dir, const std::string& csv_name, std::ostream& out) {
  if (!csv_name.empty()) write_file(dir / csv_name, csv_text(rec.rows));
  write_file(dir / "report.json", report_json_text(rec));
  out << render_text(rec);
  return rec.ok() ? 0 : 1;
}

int cmd_info(const ModelParams& p, std::ostream& out) {
  const Model m = build_model(p);
  RunRecord rec = base_record("info", p, m);
  rec.constants = theory_constants(m.g(), m.q(), m.b().n_max() >= 8 ? &m.b() : nullptr);
  out << render_text(rec);
  out << "quadrature nodes=" << m.q().size() << "  sum u chi_I=" << format_number(m.q().integral()) << "\n";
  return 0;
}

void add_suites(RunRecord& rec, const ModelParams& p, double kappa, std::optional<double> epsilon,
                const FockVector* state_at_verify, const Model& vm) {
  for (auto& c : identity_suite(vm, p.checks.random_vectors, p.seed)) rec.checks.push_back(std::move(c));
  if (!epsilon) {
    rec.warnings.push_back("inequality suite skipped: no admissible epsilon");
    return;
  }
  for (auto& c : inequality_suite(vm, kappa, *epsilon, p.checks.random_vectors, p.seed))
    rec.checks.push_back(std::move(c));
  if (state_at_verify) {
    for (auto c : check_phi3_bound(vm, kappa, *epsilon, 0, p.seed, state_at_verify)) {
      c.name += "_ground_state";
      rec.checks.push_back(std::move(c));
    }
  }
}

int cmd_solve(const ModelParams& p, std::optional<double> kappa_opt, const fs::path& dir, std::ostream& out) {
  if (!kappa_opt && p.kappas.empty()) throw ConfigError("coupling.kappa", "solve needs a coupling");
  const double kappa = kappa_opt.value_or(p.kappas.front());
  if (!(kappa >= 0.0)) throw ConfigError("kappa", "coupling must be >= 0");
  const Model m = build_model(p);
  RunRecord rec = base_record("solve", p, m);
  rec.constants = theory_constants(m.g(), m.q(), m.b().n_max() >= 8 ? &m.b() : nullptr);
  SpectralResult state;
  rec.rows.push_back(solve_row(m, p, *rec.constants, kappa, &state));
  const SweepRow& row = rec.rows.back();

  const Model vm = build_model(p, p.checks.verify_n_max);
  std::optional<double> eps;
  if (std::isfinite(row.c_eps_kappa)) eps = row.epsilon;
  const SpectralResult vstate = ground_state(HamiltonianSet(vm).Hkappa(kappa), vm.b(), lanczos_options(p));
  add_suites(rec, p, kappa, eps, &vstate.ground_vector, vm);
  if (p.output.dump_vectors) write_vector(dir / "vectors" / "ground.phi4", m.b(), state.ground_vector);
  return finish(rec, dir, "solve.csv", out);
}

int cmd_sweep(const ModelParams& p, const fs::path& dir, std::ostream& out) {
  const Model m = build_model(p);
  RunRecord rec = base_record("sweep", p, m);
  std::vector<FockVector> vectors;
  SweepReport report = sweep_kappa(p, p.kappas, p.output.dump_vectors ? &vectors : nullptr);
  rec.constants = report.constants;
  rec.fit_coefficient = report.fit_coefficient;
  rec.rows = std::move(report.rows);
  rec.checks = std::move(report.summary);
  if (p.output.dump_vectors)
    for (std::size_t i = 0; i < vectors.size(); ++i)
      if (vectors[i].size() > 0)
        write_vector(dir / "vectors" / ("ground_" + std::to_string(i) + ".phi4"), m.b(), vectors[i]);
  return finish(rec, dir, "sweep.csv", out);
}

int cmd_verify(const ModelParams& p, const fs::path& dir, std::ostream& out) {
  const Model vm = build_model(p, p.checks.verify_n_max);
  RunRecord rec = base_record("verify", p, vm);
  rec.constants = theory_constants(vm.g(), vm.q(), vm.b().n_max() >= 8 ? &vm.b() : nullptr);
  const double kappa = p.kappas.empty() ? 0.0 : p.kappas.front();
  // No ground state here: kappa c1 stands in for E0 when optimizing epsilon.
  std::optional<double> eps;
  try {
    eps = resolve_epsilon(p, vm, kappa, kappa * rec.constants->c1);
    epsilon_family(*eps, kappa, 0.0, vm.g(), vm.q());
  } catch (const EpsilonOutOfRange& e) {
    eps.reset();
    rec.warnings.push_back(e.what());
  }
  add_suites(rec, p, kappa, eps, nullptr, vm);
  if (!eps) rec.checks.push_back(CheckOutcome{"epsilon", CheckStatus::fail, {}, 0.0, 0.0, "no admissible epsilon"});
  return finish(rec, dir, "", out);
}

int cmd_report(const fs::path& dir, std::ostream& out) {
  std::ifstream f(dir / "report.json");
  if (!f) throw Error("no stored report in '" + dir.string() + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  const RunRecord rec = parse_report_json(buf.str());
  if (rec.subcommand == "sweep") write_file(dir / "sweep.csv", csv_text(rec.rows));
  if (rec.subcommand == "solve") write_file(dir / "solve.csv", csv_text(rec.rows));
  out << render_text(rec);
  return rec.ok() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"phi4lab: truncated Fock-space laboratory for the spatially cut-off phi^4 model"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  double kappa = 0.0;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "configuration file");
    if (config_required) c->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "random seed (overrides run.seed)");
  };
  auto* info = app.add_subcommand("info", "basis size, norms and constants without solving");
  auto* solve = app.add_subcommand("solve", "ground state at one coupling plus every check");
  auto* sweep = app.add_subcommand("sweep", "ground states over the coupling list");
  auto* verify = app.add_subcommand("verify", "identity and inequality suites on random vectors");
  auto* report = app.add_subcommand("report", "re-render a stored report");
  common(info, true);
  common(solve, true);
  common(sweep, true);
  common(verify, true);
  common(report, false);
  auto* kappa_opt = solve->add_option("--kappa", kappa, "coupling (default: first entry of coupling.kappa)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const bool seed_given = sub->count("--seed") > 0;
    const bool out_given = sub->count("--out") > 0;

    if (sub == report) {
      fs::path dir = out_dir;
      if (!out_given) {
        if (config_path.empty()) throw ConfigError("--out", "report needs --out or --config");
        dir = parse_config_file(config_path).output.dir;
      }
      return cmd_report(dir, out);
    }

    ModelParams p = parse_config_file(config_path);
    if (seed_given) p.seed = seed;
    if (out_given) p.output.dir = out_dir;
    validate(p);
    const fs::path dir = p.output.dir;
    if (sub == info) return cmd_info(p, out);
    if (sub == solve) return cmd_solve(p, kappa_opt->count() ? std::optional<double>(kappa) : std::nullopt, dir, out);
    if (sub == sweep) return cmd_sweep(p, dir, out);
    return cmd_verify(p, dir, out);
  } catch (const std::exception& e) {
    err << "phi4lab: error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace phi4lab
