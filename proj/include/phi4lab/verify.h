#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "phi4lab/hamiltonian.h"
#include "phi4lab/params.h"
#include "phi4lab/spectral.h"
#include "phi4lab/theory.h"

namespace phi4lab {

enum class CheckStatus { pass, pass_with_caveat, fail, skipped };

const char* to_string(CheckStatus status);

// Residual checks: measured holds the residuals, slack = threshold - worst.
// Inequality checks: slack = min over samples of (rhs - lhs) / max(|lhs|, |rhs|), and
// the check passes when slack >= -threshold.
struct CheckOutcome {
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  std::vector<double> measured;
  double threshold = 0.0;
  double slack = 0.0;
  std::string context;

  bool ok() const { return status == CheckStatus::pass || status == CheckStatus::pass_with_caveat; }
  double worst() const;
};

bool all_ok(const std::vector<CheckOutcome>& checks);

// Seeded sample stream; each check derives its own stream from (seed, label).
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, const std::string& label);
  // Standard complex normal coefficients on grades <= max_grade, normalized.
  FockVector interior_vector(const FockBasis& basis, int max_grade);
  // Standard complex normal values on every mode.
  ModeFunction mode_function(const ModeGrid& grid);
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// (f, g) = sum_i w_i conj(f_i) g_i
Complex inner(const ModeGrid& grid, const ModeFunction& f, const ModeFunction& g);

// Identity suite: residuals relative to the size of the terms involved.
CheckOutcome check_ccr(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_ccr_same(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_commutator_a(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_commutator_adag(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_commutator_phi(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_double_commutator(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_weak_commutator(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);

// Inequality suite on random vectors.
CheckOutcome check_double_commutator_bound(const Model& model, int samples, std::uint64_t seed,
                                           double tol = 1e-10);
CheckOutcome check_annihilation_bound(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_creation_bound(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
CheckOutcome check_field_bound(const Model& model, int samples, std::uint64_t seed, double tol = 1e-10);
// Both the (1 - c eps kappa) form and the lambda/mu form.
std::vector<CheckOutcome> check_hbound(const Model& model, double kappa, double epsilon, int samples,
                                       std::uint64_t seed, double tol = 1e-10);
// Pointwise product bound at every node pair and the integrated cubic-field bound.
// With `psi` given it is used (after projecting to the interior and renormalizing)
// instead of random vectors.
std::vector<CheckOutcome> check_phi3_bound(const Model& model, double kappa, double epsilon, int samples,
                                           std::uint64_t seed, const FockVector* psi = nullptr,
                                           double tol = 1e-10);

// Ground-state checks.
CheckOutcome check_number_bound(const Model& model, const SpectralResult& state, double kappa,
                                double c_eps_kappa, double tol = 1e-12);
// <N> computed as sum_i ||a_i Omega||^2 against <Omega, N Omega>.
CheckOutcome check_number_sum(const Model& model, const SpectralResult& state, double tol = 1e-12);
// |(Omega0, Phi)|^2 >= 1 - <N>, and |(Omega0, Phi)| >= sqrt(1 - c) when c < 1.
std::vector<CheckOutcome> check_overlap(const Model& model, const FockVector& phi,
                                        std::optional<double> c_eps_kappa, double tol = 1e-12);

struct PullThroughResult {
  std::vector<double> relative;  // per mode
  std::vector<double> absolute;
  double caveat_threshold = 0.0;  // C sqrt(top grade weight)
  double field_cube_norm = 0.0;   // estimate of ||phi^3|| on the top grades
  CheckOutcome outcome;
  double max_relative() const;
};
PullThroughResult check_pull_through(const Model& model, const SpectralResult& state, double kappa,
                                     double tol, const SolverSpec& solver, std::uint64_t seed);

struct AraiResult {
  double psi_tilde_norm = 0.0;
  double energy_residual = 0.0;
  double vector_residual = 0.0;
  std::vector<CheckOutcome> outcomes;
};
// Throws SpectralConditionViolated when E0 >= min omega.
AraiResult check_arai_identities(const Model& model, const SpectralResult& state, double kappa,
                                 const SolverSpec& solver);

// Random-vector suites at model.b().n_max(); kappa and epsilon feed the H-bound and
// cubic-field bound.
std::vector<CheckOutcome> identity_suite(const Model& model, int samples, std::uint64_t seed);
std::vector<CheckOutcome> inequality_suite(const Model& model, double kappa, double epsilon, int samples,
                                           std::uint64_t seed);

LanczosOptions lanczos_options(const ModelParams& params);

struct SweepRow {
  double kappa = 0.0;
  double E0 = 0.0;
  double residual = 0.0;
  double c1_kappa = 0.0;
  double e_abs = 0.0;
  double e_over_kappa = 0.0;
  double rayleigh_bound = 0.0;
  double paper_bound = 0.0;
  double n_expect = 0.0;
  double c_eps_kappa = 0.0;
  double overlap = 0.0;
  double pullthrough_resid = 0.0;
  double top_grade_weight = 0.0;
  // Not part of the CSV.
  double epsilon = 0.0;
  double psi_tilde_norm = 0.0;  // 0 when the identities were not applicable
  bool degraded = false;
  std::string error;
  std::vector<std::string> warnings;
  std::vector<CheckOutcome> checks;
};

struct SweepReport {
  TheoryConstants constants;
  std::vector<SweepRow> rows;
  double fit_coefficient = 0.0;  // least-squares C in e(kappa) ~ C kappa^2
  std::vector<CheckOutcome> summary;
  bool degraded() const;
  bool all_checks_ok() const;
};

// One full row: ground state plus every state-based check.
SweepRow solve_row(const Model& model, const ModelParams& params, const TheoryConstants& constants,
                   double kappa, SpectralResult* state_out = nullptr);
// Rows come out sorted by kappa, descending. With `vectors` set, the ground vectors
// are kept in row order (empty for failed rows).
SweepReport sweep_kappa(const ModelParams& params, const std::vector<double>& kappas,
                        std::vector<FockVector>* vectors = nullptr);
// Tail monotonicity, ratio decay and quadratic-fit checks over finished rows.
std::vector<CheckOutcome> sweep_summary(const SweepReport& report);

// The epsilon used for a given kappa and E0 under the configured policy.
double resolve_epsilon(const ModelParams& params, const Model& model, double kappa, double E0);

}  // namespace phi4lab
