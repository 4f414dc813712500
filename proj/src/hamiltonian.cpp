#include "phi4lab/hamiltonian.h"

#include <cmath>

#include "phi4lab/errors.h"

namespace phi4lab {

namespace {

FockVector apply_quartic_sum(const FockBasis& basis, const ModeGrid& grid,
                             const SpatialQuadrature& quad,
                             const std::vector<ModeFunction>& smearings, const FockVector& v) {
  FockVector out = FockVector::Zero(v.size());
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const double coeff = quad.weights()[j] * quad.chi_values()[j];
    if (coeff == 0.0) continue;
    FockVector t = v;
    for (int rep = 0; rep < 4; ++rep) t = apply_smeared(basis, grid, smearings[j], t, Smearing::segal);
    out += coeff * t;
  }
  return out;
}

std::vector<ModeFunction> node_smearings(const ModeGrid& grid, const SpatialQuadrature& quad) {
  if (grid.dimension() != quad.dimension())
    throw ConfigError("quadrature", "spatial dimension differs from momentum dimension");
  std::vector<ModeFunction> out;
  out.reserve(quad.size());
  for (std::size_t j = 0; j < quad.size(); ++j) out.push_back(field_smearing(grid, quad.node(j)));
  return out;
}

}  // namespace

ModeFunction field_smearing(const ModeGrid& grid, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(grid.dimension()))
    throw Error("field point has wrong dimension");
  ModeFunction f(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.momentum(i);
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) phase += k[a] * x[a];
    // exp(-i k.x); x = 0 gives an exactly real smearing
    f[static_cast<Eigen::Index>(i)] = grid.rho()[i] * Complex(std::cos(phase), -std::sin(phase));
  }
  return f;
}

FieldOperator build_field(const FockBasis& basis, const ModeGrid& grid, std::span<const double> x) {
  FieldOperator op;
  op.x.assign(x.begin(), x.end());
  op.smearing = field_smearing(grid, x);
  op.handle = {[&basis, &grid, f = op.smearing](const FockVector& v) {
                 return apply_smeared(basis, grid, f, v, Smearing::segal);
               },
               true, "phi(x)", basis.dim()};
  return op;
}

FockVector apply_HI(const FockBasis& basis, const ModeGrid& grid, const SpatialQuadrature& quad,
                    const FockVector& v) {
  return apply_quartic_sum(basis, grid, quad, node_smearings(grid, quad), v);
}

FockVector apply_Hkappa(const FockBasis& basis, const ModeGrid& grid, const SpatialQuadrature& quad,
                        double kappa, const FockVector& v) {
  if (!(kappa >= 0.0)) throw ConfigError("kappa", "coupling must be >= 0");
  FockVector out = apply_dgamma_omega(basis, grid, v);
  if (kappa != 0.0) out += kappa * apply_HI(basis, grid, quad, v);
  return out;
}

Model Model::create(ModeGrid grid, SpatialQuadrature quad, FockBasis basis) {
  if (grid.size() != basis.modes()) throw Error("basis mode count differs from grid size");
  Model m;
  m.node_smearings = std::make_shared<const std::vector<ModeFunction>>(phi4lab::node_smearings(grid, quad));
  m.grid = std::make_shared<const ModeGrid>(std::move(grid));
  m.quad = std::make_shared<const SpatialQuadrature>(std::move(quad));
  m.basis = std::make_shared<const FockBasis>(std::move(basis));
  return m;
}

Model build_model(const ModelParams& params, std::optional<int> n_max) {
  const int n = n_max.value_or(params.n_max);
  if (n < 0) throw ConfigError("truncation.n_max", "must be >= 0");
  ModeGrid grid = build_grid(params);
  SpatialQuadrature quad = build_spatial_quadrature(params);
  FockBasis basis(grid.size(), n, params.max_basis_dim);
  return Model::create(std::move(grid), std::move(quad), std::move(basis));
}

FockVector apply_HI(const Model& model, const FockVector& v) {
  return apply_quartic_sum(model.b(), model.g(), model.q(), *model.node_smearings, v);
}

HamiltonianSet::HamiltonianSet(Model model) : model_(std::move(model)) {
  h0_ = {[m = model_](const FockVector& v) { return apply_dgamma_omega(m.b(), m.g(), v); }, true,
         "H0", model_.b().dim()};
  hi_ = {[m = model_](const FockVector& v) { return apply_HI(m, v); }, true, "H_I", model_.b().dim()};
}

OperatorHandle HamiltonianSet::Hkappa(double kappa) const {
  if (!(kappa >= 0.0)) throw ConfigError("kappa", "coupling must be >= 0");
  return {[m = model_, kappa](const FockVector& v) {
            FockVector out = apply_dgamma_omega(m.b(), m.g(), v);
            if (kappa != 0.0) out += kappa * apply_HI(m, v);
            return out;
          },
          true, "H(kappa) = H0 + kappa H_I", model_.b().dim()};
}

OperatorHandle HamiltonianSet::field(std::span<const double> x) const {
  return {[m = model_, f = field_smearing(model_.g(), x)](const FockVector& v) {
            return apply_smeared(m.b(), m.g(), f, v, Smearing::segal);
          },
          true, "phi(x)", model_.b().dim()};
}

OperatorHandle HamiltonianSet::number() const {
  return {[m = model_](const FockVector& v) { return apply_number(m.b(), v); }, true, "N_b",
          model_.b().dim()};
}

SparseMatrix assemble_sparse(const OperatorHandle& handle, const FockBasis& basis, std::size_t max_dim,
                             double drop_tol) {
  if (basis.dim() > max_dim) throw BasisTooLarge(basis.dim(), max_dim);
  const auto n = static_cast<Eigen::Index>(basis.dim());
  std::vector<Eigen::Triplet<Complex>> entries;
  FockVector e = FockVector::Zero(n);
  for (Eigen::Index col = 0; col < n; ++col) {
    e[col] = 1.0;
    const FockVector column = handle(e);
    e[col] = 0.0;
    for (Eigen::Index row = 0; row < n; ++row)
      if (std::abs(column[row]) > drop_tol) entries.emplace_back(row, col, column[row]);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace phi4lab
