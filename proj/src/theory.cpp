#include "phi4lab/theory.h"

#include <cmath>
#include <string>

#include "phi4lab/errors.h"
#include "phi4lab/hamiltonian.h"

namespace phi4lab {

namespace {

FockVector second_order_vector(const FockBasis& basis, const ModeGrid& grid,
                               const SpatialQuadrature& quad, FockVector* projected_source) {
  const FockVector w = apply_HI(basis, grid, quad, vacuum(basis));
  FockVector wp = project_vacuum(basis, w, VacuumProjection::P0perp);
  FockVector r = apply_h0perp_inverse(basis, grid, wp);
  if (projected_source) *projected_source = std::move(wp);
  return r;
}

double c_number_at(double t, double kappa, double E0, double c_bos, double d_bos, double l1,
                   double n32) {
  // t = c_bos eps kappa in (0, 1)
  const double core = E0 * E0 + 4.0 * d_bos * kappa + c_bos * c_bos * kappa * kappa / (4.0 * t);
  return 8.0 * n32 * n32 * (core / (1.0 - t) + 0.5 * kappa * kappa * l1 * l1);
}

}  // namespace

double first_order_coefficient(const ModeGrid& grid, const SpatialQuadrature& quad) {
  const double rho2 = std::pow(cutoff_norm(grid, 0.5), 2);
  return quad.integral() * 0.75 * rho2 * rho2;
}

Lemma31Constants lemma31_constants(const FockBasis& basis, const ModeGrid& grid,
                                   const SpatialQuadrature& quad) {
  if (basis.n_max() < 8)
    throw TruncationTooSmall("second-order constants need N_max >= 8 (got " +
                             std::to_string(basis.n_max()) + ")");
  FockVector wp;
  const FockVector r = second_order_vector(basis, grid, quad, &wp);
  Lemma31Constants out;
  out.nu0 = r.squaredNorm();
  out.a = wp.dot(r).real();
  out.b = r.dot(apply_HI(basis, grid, quad, r)).real();
  return out;
}

double paper_upper_bound(double kappa, double c1, const Lemma31Constants& lemma) {
  return (c1 * kappa - lemma.a * kappa * kappa + lemma.b * kappa * kappa * kappa) / (1.0 + lemma.nu0);
}

double rayleigh_upper_bound(double kappa, double c1, const Lemma31Constants& lemma) {
  return (c1 * kappa - lemma.a * kappa * kappa + lemma.b * kappa * kappa * kappa) /
         (1.0 + kappa * kappa * lemma.nu0);
}

FockVector rayleigh_trial_vector(const FockBasis& basis, const ModeGrid& grid,
                                 const SpatialQuadrature& quad, double kappa) {
  return vacuum(basis) - kappa * second_order_vector(basis, grid, quad, nullptr);
}

HBoundConstants hbound_constants(const ModeGrid& grid, const SpatialQuadrature& quad) {
  const double l1 = quad.l1_norm();
  const double n0 = cutoff_norm(grid, 0.0);
  const double nhalf = cutoff_norm(grid, 0.5);
  const double n1 = cutoff_norm(grid, 1.0);
  return {16.0 * l1 * n0 * n0 * n1 * n1, l1 * n0 * n0 * nhalf * nhalf};
}

TheoryConstants theory_constants(const ModeGrid& grid, const SpatialQuadrature& quad,
                                 const FockBasis* lemma_basis) {
  TheoryConstants t;
  t.c1 = first_order_coefficient(grid, quad);
  if (lemma_basis && lemma_basis->n_max() >= 8) t.lemma = lemma31_constants(*lemma_basis, grid, quad);
  t.hbound = hbound_constants(grid, quad);
  t.chiI_L1 = quad.l1_norm();
  t.norm_chi_b = cutoff_norm(grid, 0.0);
  t.norm_chi_b_sqrt_omega = cutoff_norm(grid, 0.5);
  t.norm_chi_b_omega = cutoff_norm(grid, 1.0);
  t.norm_chi_b_omega32 = cutoff_norm(grid, 1.5);
  return t;
}

EpsilonFamily epsilon_family(double epsilon, double kappa, double E0, const ModeGrid& grid,
                             const SpatialQuadrature& quad) {
  const HBoundConstants hb = hbound_constants(grid, quad);
  if (!(kappa >= 0.0)) throw EpsilonOutOfRange("kappa must be >= 0");
  const double t = hb.c_bos * epsilon * kappa;
  if (!(epsilon > 0.0) || !(t < 1.0))
    throw EpsilonOutOfRange("epsilon " + std::to_string(epsilon) + " outside (0, 1/(c_bos kappa)) = (0, " +
                            std::to_string(1.0 / (hb.c_bos * kappa)) + ")");
  EpsilonFamily f;
  f.epsilon = epsilon;
  f.lambda = 1.0 / (1.0 - t);
  f.mu = kappa / (1.0 - t) * (4.0 * hb.d_bos + hb.c_bos / (4.0 * epsilon));
  const double n32 = cutoff_norm(grid, 1.5);
  const double l1 = quad.l1_norm();
  f.c_number = 8.0 * n32 * n32 * (f.lambda * E0 * E0 + f.mu + 0.5 * kappa * kappa * l1 * l1);
  return f;
}

EpsilonOptimum optimize_epsilon(double kappa, double E0, const ModeGrid& grid,
                                const SpatialQuadrature& quad) {
  const HBoundConstants hb = hbound_constants(grid, quad);
  if (!(kappa >= 0.0)) throw EpsilonOutOfRange("kappa must be >= 0");
  if (hb.c_bos * kappa == 0.0) return {1.0, epsilon_family(1.0, kappa, E0, grid, quad).c_number, true};

  const double n32 = cutoff_norm(grid, 1.5);
  const double l1 = quad.l1_norm();
  // Search over s = logit(t); c is unimodal in t, so it is unimodal in s as well.
  auto objective = [&](double s) {
    const double t = 1.0 / (1.0 + std::exp(-s));
    return c_number_at(t, kappa, E0, hb.c_bos, hb.d_bos, l1, n32);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -40.0;
  double hi = 40.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-11) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double s = 0.5 * (lo + hi);
  const double t = 1.0 / (1.0 + std::exp(-s));
  const double eps = t / (hb.c_bos * kappa);
  return {eps, epsilon_family(eps, kappa, E0, grid, quad).c_number, false};
}

}  // namespace phi4lab
