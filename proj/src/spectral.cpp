#include "phi4lab/spectral.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "phi4lab/errors.h"

namespace phi4lab {

namespace {

FockVector random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FockVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  return v / v.norm();
}

struct RitzPair {
  double value = 0.0;
  double next = std::numeric_limits<double>::infinity();
  Eigen::VectorXd coefficients;
};

RitzPair lowest_ritz(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const auto k = static_cast<Eigen::Index>(alpha.size());
  RitzPair out;
  if (k == 1) {
    out.value = alpha[0];
    out.coefficients = Eigen::VectorXd::Ones(1);
    return out;
  }
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
  Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  out.value = es.eigenvalues()[0];
  out.next = es.eigenvalues()[1];
  out.coefficients = es.eigenvectors().col(0);
  return out;
}

}  // namespace

void fix_phase(FockVector& v) {
  if (v.size() == 0) return;
  Eigen::Index pivot = 0;
  if (std::abs(v[0]) == 0.0) v.cwiseAbs().maxCoeff(&pivot);
  const double mag = std::abs(v[pivot]);
  if (mag == 0.0) return;
  v *= std::conj(v[pivot]) / mag;
  v[pivot] = Complex(std::abs(v[pivot]), 0.0);
}

SpectralResult ground_state(const OperatorHandle& H, const LanczosOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("solver.eig_tol", "must be > 0");
  if (!H.hermitian) throw Error("ground_state requires a Hermitian operator (" + H.descriptor + ")");
  const std::size_t n = H.dim;
  if (n == 0) throw Error("ground_state on an empty space");
  const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(std::max(options.krylov_dim, 2), n));

  FockVector start = random_start(n, options.seed);
  Eigen::MatrixXcd basis(static_cast<Eigen::Index>(n), m);
  int products = 0;
  SpectralResult result;

  for (;;) {
    std::vector<double> alpha;
    std::vector<double> beta;
    basis.col(0) = start;
    for (Eigen::Index j = 0; j < m; ++j) {
      FockVector w = H(basis.col(j));
      ++products;
      const double a = basis.col(j).dot(w).real();
      alpha.push_back(a);
      w -= a * basis.col(j);
      if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
      const double b = w.norm();
      double scale = 0.0;
      for (double x : alpha) scale = std::max(scale, std::abs(x));
      for (double x : beta) scale = std::max(scale, x);
      // Invariant subspace reached, or basis full.
      if (j + 1 == m || b <= 1e-14 * std::max(scale, 1.0)) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }

    const RitzPair ritz = lowest_ritz(alpha, beta);
    const auto k = static_cast<Eigen::Index>(alpha.size());
    FockVector x = basis.leftCols(k) * ritz.coefficients.cast<Complex>();
    x /= x.norm();
    const FockVector hx = H(x);
    ++products;
    const double energy = x.dot(hx).real();
    const double residual = (hx - energy * x).norm();

    result.E0 = energy;
    result.residual = residual;
    result.iterations = products;
    result.gap_estimate = ritz.next - ritz.value;
    result.ground_vector = std::move(x);
    if (residual <= options.tol) break;
    if (products >= options.max_iter) throw NoConvergence("Lanczos ground state (" + H.descriptor + ")", products);
    start = result.ground_vector;
  }

  fix_phase(result.ground_vector);
  if (result.gap_estimate < options.degeneracy_rel * std::max(1.0, std::abs(result.E0))) {
    result.near_degenerate = true;
    result.warnings.push_back("NearDegenerate: lowest Ritz values differ by " +
                              std::to_string(result.gap_estimate));
  }
  return result;
}

SpectralResult ground_state(const OperatorHandle& H, const FockBasis& basis, const LanczosOptions& options) {
  SpectralResult result = ground_state(H, options);
  result.top_grade_weight = weight_above_grade(basis, result.ground_vector, basis.n_max() - 4);
  return result;
}

FockVector solve_shifted(const OperatorHandle& H, double shift, const FockVector& rhs,
                         const ShiftedSolveOptions& options) {
  if (static_cast<std::size_t>(rhs.size()) != H.dim) throw Error("solve_shifted: rhs has wrong length");
  double floor = 0.0;
  if (options.spectrum_floor) {
    floor = *options.spectrum_floor;
  } else {
    LanczosOptions lo;
    lo.tol = 1e-8;
    lo.seed = options.seed;
    const SpectralResult est = ground_state(H, lo);
    floor = est.E0 - est.residual;
  }
  if (!(floor + shift > 0.0))
    throw IndefiniteShift("shift " + std::to_string(shift) + " does not make " + H.descriptor +
                          " positive definite (spectrum floor " + std::to_string(floor) + ")");

  const double rhs_norm = rhs.norm();
  FockVector x = FockVector::Zero(rhs.size());
  if (rhs_norm == 0.0) return x;
  const double target = options.tol * rhs_norm;
  int iterations = 0;

  // Outer loop recomputes the true residual to guard against recurrence drift.
  for (int outer = 0; outer < 4; ++outer) {
    FockVector r = rhs - (H(x) + shift * x);
    if (r.norm() <= target) return x;
    FockVector p = r;
    double rs = r.squaredNorm();
    while (iterations < options.max_iter) {
      ++iterations;
      const FockVector ap = H(p) + shift * p;
      const double pap = p.dot(ap).real();
      if (!(pap > 0.0))
        throw IndefiniteShift("conjugate gradients met a nonpositive curvature in " + H.descriptor);
      const double step = rs / pap;
      x += step * p;
      r -= step * ap;
      const double rs_new = r.squaredNorm();
      if (std::sqrt(rs_new) <= 0.5 * target) break;
      p = r + (rs_new / rs) * p;
      rs = rs_new;
    }
    if (iterations >= options.max_iter) break;
  }
  if ((rhs - (H(x) + shift * x)).norm() <= target) return x;
  throw NoConvergence("shifted conjugate gradients (" + H.descriptor + ")", iterations);
}

double rayleigh_quotient(const OperatorHandle& H, const FockVector& v) {
  const double nn = v.squaredNorm();
  if (nn == 0.0) throw ZeroVector("Rayleigh quotient of the zero vector");
  return v.dot(H(v)).real() / nn;
}

}  // namespace phi4lab
