#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phi4lab/fock.h"

namespace phi4lab {

struct LanczosOptions {
  double tol = 1e-10;         // on the residual norm ||H v - E v||
  int max_iter = 5000;        // total matrix-vector products
  int krylov_dim = 120;       // basis size per restart cycle
  std::uint64_t seed = 1;
  double degeneracy_rel = 1e-8;
};

struct SpectralResult {
  double E0 = 0.0;
  FockVector ground_vector;
  double residual = 0.0;
  int iterations = 0;
  double gap_estimate = 0.0;
  double top_grade_weight = 0.0;
  bool near_degenerate = false;
  std::vector<std::string> warnings;
};

/// Lowest eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. The returned vector has unit norm; its vacuum
/// coefficient is real and nonnegative (if that coefficient vanishes, the
/// largest-magnitude coefficient is made real and positive instead).
/// Throws NoConvergence when the residual stays above tol after max_iter products.
SpectralResult ground_state(const OperatorHandle& H, const LanczosOptions& options);

// Same, and fills top_grade_weight: weight in grades > N_max - 4 of `basis`.
SpectralResult ground_state(const OperatorHandle& H, const FockBasis& basis,
                            const LanczosOptions& options);

struct ShiftedSolveOptions {
  double tol = 1e-12;  // relative residual ||(H + shift) x - rhs|| / ||rhs||
  int max_iter = 5000;
  // Known lower bound of the spectrum of H on the subspace the iteration lives in.
  // When absent, it is estimated with a Lanczos ground-state run.
  std::optional<double> spectrum_floor;
  std::uint64_t seed = 1;
};

// Solves (H + shift) x = rhs by conjugate gradients. Throws IndefiniteShift if
// H + shift is not positive definite, NoConvergence if CG stalls.
FockVector solve_shifted(const OperatorHandle& H, double shift, const FockVector& rhs,
                         const ShiftedSolveOptions& options = {});

// <v, H v> / <v, v>; throws ZeroVector for v = 0.
double rayleigh_quotient(const OperatorHandle& H, const FockVector& v);

// Vacuum-first phase convention used by ground_state.
void fix_phase(FockVector& v);

}  // namespace phi4lab
