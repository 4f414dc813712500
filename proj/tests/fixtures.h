#pragma once

#include <string>
#include <vector>

#include "phi4lab/config.h"
#include "phi4lab/hamiltonian.h"
#include "phi4lab/params.h"

#ifndef PHI4LAB_SOURCE_DIR
#define PHI4LAB_SOURCE_DIR "."
#endif

namespace fixtures {

inline std::string reference_config() { return std::string(PHI4LAB_SOURCE_DIR) + "/configs/reference.ini"; }

inline phi4lab::ModelParams reference_params() { return phi4lab::parse_config_file(reference_config()); }

// Explicit 1d modes with a gaussian chi_b and a 5-node gaussian chi_I off the origin,
// so every field carries genuine phases.
inline phi4lab::ModelParams small_params(std::vector<double> modes, std::vector<double> weights, int n_max) {
  phi4lab::ModelParams p;
  p.dimension = 1;
  p.mass = 1.0;
  p.grid.explicit_modes = std::move(modes);
  p.grid.explicit_weights = std::move(weights);
  p.n_max = n_max;
  p.chi_b.kind = phi4lab::CutoffKind::gaussian;
  p.chi_b.sigma = 1.5;
  p.chi_I.kind = phi4lab::CutoffKind::gaussian;
  p.chi_I.center = {0.3};
  p.chi_I.sigma = 0.4;
  p.quadrature.nodes_per_axis = 5;
  p.kappas = {0.1};
  return p;
}

inline phi4lab::Model one_mode(int n_max) { return phi4lab::build_model(small_params({0.4}, {0.8}, n_max)); }
inline phi4lab::Model two_modes(int n_max) {
  return phi4lab::build_model(small_params({-0.7, 1.2}, {0.6, 0.9}, n_max));
}

// Single mode k=0, w=1, chi_b = 1 (so rho = 1), one quadrature node of weight 1.
inline phi4lab::Model unit_oscillator(int n_max) {
  auto grid = phi4lab::ModeGrid::from_modes(1, 1.0, {0.0}, {1.0}, {1.0});
  auto quad = phi4lab::SpatialQuadrature::from_nodes(1, {0.0}, {1.0}, {1.0});
  return phi4lab::Model::create(std::move(grid), std::move(quad), phi4lab::FockBasis(1, n_max));
}

}  // namespace fixtures
