#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phi4lab/params.h"

namespace phi4lab {

/// Discrete one-particle momentum space.
///
/// Modes are stored lexicographically ordered by momentum. Each mode carries a
/// quadrature weight w_i (the cell measure), the dispersion omega_i = sqrt(k_i^2 + m^2),
/// the UV cutoff value chi_b(k_i) and rho_i = chi_b(k_i) / sqrt(omega_i).
class ModeGrid {
 public:
  // Validates, sorts and evaluates omega/rho. `momenta` is flattened (dimension
  // entries per mode); `chi_b` has one value per mode in the same input order.
  static ModeGrid from_modes(int dimension, double mass, std::vector<double> momenta,
                             std::vector<double> weights, std::vector<double> chi_b);

  int dimension() const { return dimension_; }
  double mass() const { return mass_; }
  std::size_t size() const { return weights_.size(); }

  std::span<const double> momentum(std::size_t i) const {
    return {momenta_.data() + i * static_cast<std::size_t>(dimension_),
            static_cast<std::size_t>(dimension_)};
  }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> omega() const { return omega_; }
  std::span<const double> chi_b() const { return chi_b_; }
  std::span<const double> rho() const { return rho_; }

  double min_omega() const;
  // True when the mode set, weights and chi_b are invariant under k -> -k.
  bool is_reflection_symmetric(double tol = 1e-12) const;

 private:
  int dimension_ = 1;
  double mass_ = 0.0;
  std::vector<double> momenta_;
  std::vector<double> weights_;
  std::vector<double> omega_;
  std::vector<double> chi_b_;
  std::vector<double> rho_;
};

/// Position-space quadrature for the spatial cutoff integral.
class SpatialQuadrature {
 public:
  static SpatialQuadrature from_nodes(int dimension, std::vector<double> nodes,
                                      std::vector<double> weights, std::vector<double> chi_values);

  int dimension() const { return dimension_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> node(std::size_t j) const {
    return {nodes_.data() + j * static_cast<std::size_t>(dimension_),
            static_cast<std::size_t>(dimension_)};
  }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> chi_values() const { return chi_values_; }

  // sum_j u_j chi_I(x_j)
  double integral() const;
  // sum_j u_j |chi_I(x_j)|, the discrete L1 norm used downstream
  double l1_norm() const;
  // Mass of a gaussian profile lost by truncating at 6 sigma (0 for other kinds).
  double truncation_error() const { return truncation_error_; }
  void set_truncation_error(double e) { truncation_error_ = e; }

 private:
  int dimension_ = 1;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> chi_values_;
  double truncation_error_ = 0.0;
};

ModeGrid build_grid(const ModelParams& params);

// (sum_i w_i |chi_b(k_i)|^2 / omega_i^(2p))^(1/2)
double cutoff_norm(const ModeGrid& grid, double exponent);

SpatialQuadrature build_spatial_quadrature(const ModelParams& params);

// Two-column whitespace separated (point, value) table; '#' starts a comment.
std::vector<std::pair<double, double>> read_cutoff_table(const std::string& path);

}  // namespace phi4lab
