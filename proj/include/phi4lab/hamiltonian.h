#pragma once

#include <Eigen/SparseCore>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phi4lab/fock.h"
#include "phi4lab/grid.h"

namespace phi4lab {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

// Field smearing rho_{b,x}(k_i) = rho_b(k_i) exp(-i k_i . x).
ModeFunction field_smearing(const ModeGrid& grid, std::span<const double> x);

struct FieldOperator {
  std::vector<double> x;
  ModeFunction smearing;
  OperatorHandle handle;
};

// phi(x) = (a(rho_{b,x}) + a^dagger(rho_{b,x})) / sqrt(2). The handle refers to
// `basis` and `grid`, which must outlive it.
FieldOperator build_field(const FockBasis& basis, const ModeGrid& grid, std::span<const double> x);

// sum_j u_j chi_I(x_j) phi(x_j)^4 v, four successive truncated field applications per node.
FockVector apply_HI(const FockBasis& basis, const ModeGrid& grid, const SpatialQuadrature& quad,
                    const FockVector& v);
FockVector apply_Hkappa(const FockBasis& basis, const ModeGrid& grid, const SpatialQuadrature& quad,
                        double kappa, const FockVector& v);

/// Shared ownership of one discretized model: grid, spatial quadrature and basis.
/// Operator handles built from it keep it alive.
struct Model {
  std::shared_ptr<const ModeGrid> grid;
  std::shared_ptr<const SpatialQuadrature> quad;
  std::shared_ptr<const FockBasis> basis;
  // Smearings of phi(x_j) at every quadrature node, precomputed.
  std::shared_ptr<const std::vector<ModeFunction>> node_smearings;

  static Model create(ModeGrid grid, SpatialQuadrature quad, FockBasis basis);

  const ModeGrid& g() const { return *grid; }
  const SpatialQuadrature& q() const { return *quad; }
  const FockBasis& b() const { return *basis; }
};

// Grid, quadrature and basis from a parameter set; n_max overrides params.n_max.
Model build_model(const ModelParams& params, std::optional<int> n_max = std::nullopt);

class HamiltonianSet {
 public:
  explicit HamiltonianSet(Model model);

  const Model& model() const { return model_; }
  const OperatorHandle& H0() const { return h0_; }
  const OperatorHandle& HI() const { return hi_; }
  OperatorHandle Hkappa(double kappa) const;
  OperatorHandle field(std::span<const double> x) const;
  OperatorHandle number() const;

 private:
  Model model_;
  OperatorHandle h0_;
  OperatorHandle hi_;
};

// H_I applied through the precomputed node smearings of `model`.
FockVector apply_HI(const Model& model, const FockVector& v);

// Column-by-column assembly from unit vectors; entries with |value| <= drop_tol are omitted.
SparseMatrix assemble_sparse(const OperatorHandle& handle, const FockBasis& basis,
                             std::size_t max_dim = 20000, double drop_tol = 0.0);

}  // namespace phi4lab
