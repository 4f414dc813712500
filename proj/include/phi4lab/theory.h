#pragma once

#include <optional>

#include "phi4lab/fock.h"
#include "phi4lab/grid.h"

namespace phi4lab {

// The three second-order quantities built from r = (H0perp)^-1 P0perp H_I Omega0:
// nu0 = ||r||^2, a = <P0perp H_I Omega0, r>, b = <r, H_I r>.
struct Lemma31Constants {
  double nu0 = 0.0;
  double a = 0.0;
  double b = 0.0;
};

struct HBoundConstants {
  double c_bos = 0.0;
  double d_bos = 0.0;
};

struct TheoryConstants {
  double c1 = 0.0;
  std::optional<Lemma31Constants> lemma;  // absent when N_max < 8
  HBoundConstants hbound;
  double chiI_L1 = 0.0;
  double norm_chi_b = 0.0;             // ||chi_b||
  double norm_chi_b_sqrt_omega = 0.0;  // ||chi_b / omega^(1/2)|| = ||rho_b||
  double norm_chi_b_omega = 0.0;       // ||chi_b / omega||
  double norm_chi_b_omega32 = 0.0;     // ||chi_b / omega^(3/2)||
};

struct EpsilonFamily {
  double epsilon = 0.0;
  double lambda = 1.0;
  double mu = 0.0;
  double c_number = 0.0;
};

struct EpsilonOptimum {
  double epsilon = 1.0;
  double c_number = 0.0;
  bool degenerate = false;  // c_bos * kappa = 0: c_{eps,kappa} does not depend on eps
};

// (sum_j u_j chi_I(x_j)) * 3/4 * ||rho_b||^4, the vacuum expectation of H_I.
double first_order_coefficient(const ModeGrid& grid, const SpatialQuadrature& quad);

// Throws TruncationTooSmall if basis.n_max() < 8.
Lemma31Constants lemma31_constants(const FockBasis& basis, const ModeGrid& grid,
                                   const SpatialQuadrature& quad);

// (c1 kappa - a kappa^2 + b kappa^3) / (1 + nu0), evaluated as displayed.
double paper_upper_bound(double kappa, double c1, const Lemma31Constants& lemma);
// (c1 kappa - a kappa^2 + b kappa^3) / (1 + kappa^2 nu0): Rayleigh quotient of the trial
// vector Omega0 - kappa (H0perp)^-1 P0perp H_I Omega0.
double rayleigh_upper_bound(double kappa, double c1, const Lemma31Constants& lemma);
FockVector rayleigh_trial_vector(const FockBasis& basis, const ModeGrid& grid,
                                 const SpatialQuadrature& quad, double kappa);

HBoundConstants hbound_constants(const ModeGrid& grid, const SpatialQuadrature& quad);

TheoryConstants theory_constants(const ModeGrid& grid, const SpatialQuadrature& quad,
                                 const FockBasis* lemma_basis);

// lambda = 1/(1 - c_bos eps kappa), mu = kappa/(1 - c_bos eps kappa) (4 d_bos + c_bos/(4 eps)),
// c = 8 ||chi_b/omega^(3/2)||^2 (lambda E0^2 + mu + kappa^2/2 ||chi_I||_1^2).
// Throws EpsilonOutOfRange unless 0 < eps < 1/(c_bos kappa).
EpsilonFamily epsilon_family(double epsilon, double kappa, double E0, const ModeGrid& grid,
                             const SpatialQuadrature& quad);

// Minimizes c_{eps,kappa} over the admissible interval by golden-section search.
EpsilonOptimum optimize_epsilon(double kappa, double E0, const ModeGrid& grid,
                                const SpatialQuadrature& quad);

}  // namespace phi4lab
