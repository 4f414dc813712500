// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance <1..8>   runs a single criterion
//   acceptance          runs all of them
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dense_oracle.h"
#include "fixtures.h"
#include "phi4lab/cli.h"
#include "phi4lab/hamiltonian.h"
#include "phi4lab/spectral.h"
#include "phi4lab/theory.h"
#include "phi4lab/verify.h"

using namespace phi4lab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const SweepReport& reference_sweep() {
  static const SweepReport rep = [] {
    const ModelParams p = fixtures::reference_params();
    return sweep_kappa(p, p.kappas);
  }();
  return rep;
}

const CheckOutcome* find(const std::vector<CheckOutcome>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Every operator entry-wise against the dense construction, ground energies
// against full diagonalization.
Verdict oracle_equivalence() {
  Verdict v;
  double worst_entry = 0.0;
  double worst_energy = 0.0;
  const std::vector<std::pair<Model, std::string>> cases = {{fixtures::unit_oscillator(12), "M=1,N=12"},
                                                            {fixtures::two_modes(4), "M=2,N=4"}};
  for (const auto& [m, label] : cases) {
    const HamiltonianSet hs(m);
    const oracle::Space sp(m.b());
    const auto h0 = oracle::free_hamiltonian(sp, m.g());
    const auto hi = oracle::interaction(sp, m.g(), m.q());
    auto compare = [&](const OperatorHandle& op, const oracle::Dense& dense, const std::string& what) {
      const double d = (oracle::columns(op, m.b()) - dense).cwiseAbs().maxCoeff();
      worst_entry = std::max(worst_entry, d);
      v.require(d <= 1e-14, label + " " + what + " differs by " + num(d));
    };
    compare(hs.H0(), h0, "H0");
    compare(hs.number(), oracle::number(sp), "N");
    for (double x : {0.0, 0.37, -1.9}) {
      const std::vector<double> xs = {x};
      compare(hs.field(xs), oracle::field(sp, m.g(), xs), "phi(" + num(x) + ")");
    }
    compare(hs.HI(), hi, "H_I");
    for (double k : {0.05, 0.1, 0.4}) {
      const auto hk = h0 + k * hi;
      compare(hs.Hkappa(k), hk, "H_kappa(" + num(k) + ")");
      const SpectralResult g = ground_state(hs.Hkappa(k), m.b(), LanczosOptions{});
      const double d = std::abs(g.E0 - oracle::lowest_eigenvalue(hk));
      worst_energy = std::max(worst_energy, d);
      v.require(d <= 1e-10, label + " E0 at kappa " + num(k) + " differs by " + num(d));
    }
  }
  if (v.pass) v.detail = "max entry diff " + num(worst_entry) + ", max E0 diff " + num(worst_energy);
  return v;
}

Verdict identity_suite_criterion() {
  Verdict v;
  const ModelParams p = fixtures::reference_params();
  const Model m = build_model(p, p.checks.verify_n_max);
  double worst = 0.0;
  for (const auto& c : identity_suite(m, p.checks.random_vectors, p.seed)) {
    worst = std::max(worst, c.worst());
    v.require(c.status == CheckStatus::pass && c.worst() <= 1e-10, c.name + " residual " + num(c.worst()));
  }
  if (v.pass) v.detail = "7 identities, 100 vectors each, worst residual " + num(worst);
  return v;
}

Verdict inequality_suite_criterion() {
  Verdict v;
  const ModelParams p = fixtures::reference_params();
  const Model fine = build_model(p, p.checks.verify_n_max);
  const HamiltonianSet hs(fine);
  const SweepReport& rep = reference_sweep();
  double min_slack = INFINITY;
  int counted = 0;
  int skipped = 0;
  auto take = [&](const CheckOutcome& c, const std::string& where) {
    if (c.status == CheckStatus::skipped) {
      ++skipped;
      return;
    }
    ++counted;
    min_slack = std::min(min_slack, c.slack);
    v.require(c.ok() && c.slack >= 0.0, c.name + " at " + where + " slack " + num(c.slack));
  };
  for (const auto& row : rep.rows) {
    const std::string where = "kappa " + num(row.kappa);
    v.require(row.error.empty(), where + ": " + row.error);
    for (const char* name : {"number_bound", "overlap_number", "overlap_c_eps"})
      if (const CheckOutcome* c = find(row.checks, name)) take(*c, where);
    for (const auto& c : inequality_suite(fine, row.kappa, row.epsilon, p.checks.random_vectors, p.seed))
      take(c, where);
    const SpectralResult g = ground_state(hs.Hkappa(row.kappa), fine.b(), lanczos_options(p));
    for (const auto& c : check_phi3_bound(fine, row.kappa, row.epsilon, 1, p.seed, &g.ground_vector))
      take(c, where + " (ground state)");
  }
  if (v.pass)
    v.detail = std::to_string(counted) + " checks, min slack " + num(min_slack) + ", " +
               std::to_string(skipped) + " not applicable";
  return v;
}

Verdict variational_bound() {
  Verdict v;
  const ModelParams p = fixtures::reference_params();
  const Model m = build_model(p);
  const HamiltonianSet hs(m);
  const SweepReport& rep = reference_sweep();
  if (!rep.constants.lemma) {
    v.require(false, "second-order constants unavailable");
    return v;
  }
  double worst_rel = 0.0;
  double min_slack = INFINITY;
  for (const auto& row : rep.rows) {
    const double rb = rayleigh_upper_bound(row.kappa, rep.constants.c1, *rep.constants.lemma);
    const double slack = rb - row.E0;
    min_slack = std::min(min_slack, slack);
    v.require(slack >= -1e-10, "E0 above bound at kappa " + num(row.kappa) + " by " + num(-slack));
    const double rq = rayleigh_quotient(hs.Hkappa(row.kappa), rayleigh_trial_vector(m.b(), m.g(), m.q(), row.kappa));
    const double rel = std::abs(rb - rq) / std::abs(rq);
    worst_rel = std::max(worst_rel, rel);
    v.require(rel <= 1e-12, "closed form vs quotient at kappa " + num(row.kappa) + " rel " + num(rel));
  }
  if (v.pass) v.detail = "min slack " + num(min_slack) + ", closed form vs quotient " + num(worst_rel);
  return v;
}

Verdict first_order_asymptotics() {
  Verdict v;
  const SweepReport& rep = reference_sweep();
  for (const char* name : {"ratio_tail_decreasing", "ratio_decay", "quadratic_fit"}) {
    const CheckOutcome* c = find(rep.summary, name);
    if (!c) {
      v.require(false, std::string(name) + " missing");
      continue;
    }
    std::string m;
    for (double x : c->measured) m += (m.empty() ? "" : " ") + num(x);
    v.require(c->ok(), std::string(name) + " [" + m + "]");
  }
  std::string ratios;
  for (const auto& row : rep.rows) ratios += (ratios.empty() ? "" : " ") + num(row.e_over_kappa);
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("e/kappa: ") + ratios;
  return v;
}

Verdict pull_through() {
  Verdict v;
  const ModelParams p = fixtures::reference_params();
  const double kappa = 0.05;
  std::vector<double> maxima;
  for (int n : {8, 10, 12}) {
    const Model m = build_model(p, n);
    const HamiltonianSet hs(m);
    const SpectralResult g = ground_state(hs.Hkappa(kappa), m.b(), lanczos_options(p));
    maxima.push_back(check_pull_through(m, g, kappa, p.checks.pullthrough_tol, p.solver, p.seed).max_relative());
  }
  v.require(maxima[1] <= 1e-6, "N_max=10 residual " + num(maxima[1]) + " > 1e-06");
  v.require(maxima[1] < maxima[0] && maxima[2] < maxima[1], "not monotone in N_max");
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("N_max 8/10/12: ") + num(maxima[0]) + " " +
              num(maxima[1]) + " " + num(maxima[2]);
  return v;
}

Verdict arai() {
  Verdict v;
  const SweepReport& rep = reference_sweep();
  const ModelParams p = fixtures::reference_params();
  const double gap = build_grid(p).min_omega();
  double worst_energy = 0.0;
  double worst_vector = 0.0;
  std::vector<double> norms;
  int applicable = 0;
  for (const auto& row : rep.rows) {
    if (!(row.E0 < gap)) continue;
    ++applicable;
    const CheckOutcome* e = find(row.checks, "arai_energy");
    const CheckOutcome* x = find(row.checks, "arai_vector");
    if (!e || !x || e->status == CheckStatus::skipped || x->status == CheckStatus::skipped) {
      v.require(false, "identities not evaluated at kappa " + num(row.kappa));
      continue;
    }
    worst_energy = std::max(worst_energy, e->worst());
    worst_vector = std::max(worst_vector, x->worst());
    v.require(e->worst() <= 1e-9, "energy identity residual " + num(e->worst()) + " at kappa " + num(row.kappa));
    v.require(x->worst() <= 1e-8, "vector identity residual " + num(x->worst()) + " at kappa " + num(row.kappa));
    norms.push_back(row.psi_tilde_norm);
  }
  v.require(norms.size() >= 5, "fewer than 5 rows below the mass gap");
  for (std::size_t i = norms.size() >= 5 ? norms.size() - 5 : 0; i + 1 < norms.size(); ++i)
    v.require(norms[i + 1] - 1.0 < norms[i] - 1.0 && norms[i + 1] >= 1.0,
              "norm of the normalized state not decreasing to 1 at tail index " + std::to_string(i));
  if (v.pass)
    v.detail = std::to_string(applicable) + " rows, residuals " + num(worst_energy) + " / " + num(worst_vector) +
               ", final norm " + num(norms.empty() ? 0.0 : norms.back());
  return v;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  Verdict v;
  const fs::path base = fs::temp_directory_path() / "phi4lab-acceptance-determinism";
  fs::remove_all(base);
  std::vector<std::string> csv;
  for (const char* run : {"a", "b"}) {
    const std::string out = (base / run).string();
    const std::string cfg = fixtures::reference_config();
    const char* argv[] = {"phi4lab", "sweep", "--config", cfg.c_str(), "--out", out.c_str()};
    std::ostringstream sink;
    const int rc = run_cli(6, argv, sink, sink);
    v.require(rc != 2, std::string("sweep run ") + run + " errored");
    csv.push_back(slurp(base / run / "sweep.csv"));
  }
  v.require(!csv[0].empty(), "no CSV written");
  v.require(csv[0] == csv[1], "CSV bytes differ between runs");
  if (v.pass) v.detail = std::to_string(csv[0].size()) + " identical bytes";
  return v;
}

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds, 0 for none
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "oracle equivalence", 10.0, oracle_equivalence},
      {2, "algebraic identities", 30.0, identity_suite_criterion},
      {3, "inequalities", 120.0, inequality_suite_criterion},
      {4, "variational upper bound", 0.0, variational_bound},
      {5, "first-order asymptotics", 300.0, first_order_asymptotics},
      {6, "pull-through formula", 0.0, pull_through},
      {7, "resolvent identities", 0.0, arai},
      {8, "determinism", 0.0, determinism},
  };
  int selected = 0;
  if (argc > 1) selected = std::atoi(argv[1]);
  bool ok = true;
  for (const auto& c : all) {
    if (selected != 0 && c.id != selected) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) v.require(false, "took " + num(secs) + " s");
    std::printf("criterion %d (%s): %s  [%.2f s] %s\n", c.id, c.title, v.pass ? "PASS" : "FAIL", secs,
                v.detail.c_str());
    ok = ok && v.pass;
  }
  return ok ? 0 : 1;
}
