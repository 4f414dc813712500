#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace phi4lab {

enum class CutoffKind { indicator, gaussian, tabulated };

// A real profile on R^d used for both the UV cutoff chi_b (momentum space) and
// the spatial cutoff chi_I (position space).
//
//   indicator:  scale * 1{|x - center| <= radius}
//   gaussian:   scale * exp(-|x - center|^2 / (2 sigma^2))
//   tabulated:  scale * linear interpolation of `table` at |x - center| for d > 1,
//               at x - center for d = 1; zero outside the table range.
struct CutoffSpec {
  CutoffKind kind = CutoffKind::indicator;
  std::vector<double> center;  // empty means origin
  double radius = 1.0;
  double sigma = 1.0;
  double scale = 1.0;
  std::vector<std::pair<double, double>> table;
  std::string table_path;  // echoed when the table came from a file

  double evaluate(const double* x, int dimension) const;

  // Box [lo, hi] per axis outside which the profile is zero (or, for gaussians,
  // below the 6 sigma truncation).
  std::pair<double, double> support_interval(int axis) const;

  bool operator==(const CutoffSpec&) const = default;
};

struct MomentumGridSpec {
  double cutoff = 3.0;  // K: grid covers [-K, K]^d
  int points_per_axis = 3;
  // Explicit mode list (flattened, dimension entries per mode) with one weight each.
  // When non-empty it replaces the uniform rule.
  std::vector<double> explicit_modes;
  std::vector<double> explicit_weights;

  bool operator==(const MomentumGridSpec&) const = default;
};

struct QuadratureSpec {
  int nodes_per_axis = 9;
  std::string rule = "trapezoid";

  bool operator==(const QuadratureSpec&) const = default;
};

struct SolverSpec {
  double eig_tol = 1e-10;
  double lin_tol = 1e-12;
  int max_iter = 5000;
  int krylov_dim = 120;
  double degeneracy_rel = 1e-8;

  bool operator==(const SolverSpec&) const = default;
};

enum class EpsilonPolicy { optimized, fixed };

struct CheckSpec {
  int random_vectors = 100;
  int verify_n_max = 12;
  double pullthrough_tol = 1e-6;

  bool operator==(const CheckSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "phi4lab-out";
  bool dump_vectors = false;

  bool operator==(const OutputSpec&) const = default;
};

struct ModelParams {
  int dimension = 1;
  double mass = 1.0;
  MomentumGridSpec grid;
  int n_max = 8;
  std::size_t max_basis_dim = 2'000'000;
  CutoffSpec chi_b;
  CutoffSpec chi_I;
  QuadratureSpec quadrature;
  std::vector<double> kappas;
  SolverSpec solver;
  std::uint64_t seed = 20240901;
  EpsilonPolicy epsilon_policy = EpsilonPolicy::optimized;
  double epsilon = 0.0;
  CheckSpec checks;
  OutputSpec output;

  bool operator==(const ModelParams&) const = default;
};

}  // namespace phi4lab
