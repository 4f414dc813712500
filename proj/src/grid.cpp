#include "phi4lab/grid.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "phi4lab/errors.h"

namespace phi4lab {

namespace {

double center_coord(const CutoffSpec& spec, int axis) {
  return spec.center.empty() ? 0.0 : spec.center[static_cast<std::size_t>(axis)];
}

double interpolate(const std::vector<std::pair<double, double>>& table, double t) {
  if (table.empty() || t < table.front().first || t > table.back().first) return 0.0;
  auto upper = std::lower_bound(table.begin(), table.end(), t,
                                [](const auto& entry, double v) { return entry.first < v; });
  if (upper == table.begin()) return upper->second;
  if (upper->first == t) return upper->second;
  auto lower = std::prev(upper);
  const double frac = (t - lower->first) / (upper->first - lower->first);
  return lower->second + frac * (upper->second - lower->second);
}

// Cartesian product of per-axis 1-D rules, last axis fastest (lexicographic order).
void tensor_product(int dimension, const std::vector<double>& points,
                    const std::vector<double>& weights, std::vector<double>& out_points,
                    std::vector<double>& out_weights) {
  const std::size_t n = points.size();
  std::size_t total = 1;
  for (int a = 0; a < dimension; ++a) total *= n;
  out_points.resize(total * static_cast<std::size_t>(dimension));
  out_weights.resize(total);
  std::vector<std::size_t> digit(static_cast<std::size_t>(dimension), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int a = dimension - 1; a >= 0; --a) {
      digit[static_cast<std::size_t>(a)] = rem % n;
      rem /= n;
    }
    double w = 1.0;
    for (int a = 0; a < dimension; ++a) {
      out_points[flat * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(a)] =
          points[digit[static_cast<std::size_t>(a)]];
      w *= weights[digit[static_cast<std::size_t>(a)]];
    }
    out_weights[flat] = w;
  }
}

}  // namespace

double CutoffSpec::evaluate(const double* x, int dimension) const {
  double r2 = 0.0;
  for (int a = 0; a < dimension; ++a) {
    const double dx = x[a] - center_coord(*this, a);
    r2 += dx * dx;
  }
  switch (kind) {
    case CutoffKind::indicator:
      return r2 <= radius * radius ? scale : 0.0;
    case CutoffKind::gaussian:
      return scale * std::exp(-r2 / (2.0 * sigma * sigma));
    case CutoffKind::tabulated: {
      const double t = dimension == 1 ? x[0] - center_coord(*this, 0) : std::sqrt(r2);
      return scale * interpolate(table, t);
    }
  }
  return 0.0;
}

std::pair<double, double> CutoffSpec::support_interval(int axis) const {
  const double c = center_coord(*this, axis);
  switch (kind) {
    case CutoffKind::indicator:
      return {c - radius, c + radius};
    case CutoffKind::gaussian:
      return {c - 6.0 * sigma, c + 6.0 * sigma};
    case CutoffKind::tabulated: {
      if (table.empty()) return {c, c};
      const double lo = table.front().first;
      const double hi = table.back().first;
      const double reach = std::max(std::abs(lo), std::abs(hi));
      return {c - reach, c + reach};
    }
  }
  return {c, c};
}

ModeGrid ModeGrid::from_modes(int dimension, double mass, std::vector<double> momenta,
                              std::vector<double> weights, std::vector<double> chi_b) {
  if (dimension < 1) throw ConfigError("model.dimension", "must be positive");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw ConfigError("model.mass", "must be >= 0");
  const auto d = static_cast<std::size_t>(dimension);
  if (momenta.empty() || momenta.size() % d != 0)
    throw ConfigError("grid.modes", "need a positive multiple of the dimension entries");
  const std::size_t count = momenta.size() / d;
  if (weights.size() != count) throw ConfigError("grid.weights", "one weight per mode required");
  if (chi_b.size() != count) throw ConfigError("chi_b", "one value per mode required");

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) { return momenta.begin() + static_cast<std::ptrdiff_t>(i * d); };
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::lexicographical_compare(key(l), key(l) + static_cast<std::ptrdiff_t>(d), key(r),
                                        key(r) + static_cast<std::ptrdiff_t>(d));
  });

  ModeGrid grid;
  grid.dimension_ = dimension;
  grid.mass_ = mass;
  grid.momenta_.reserve(momenta.size());
  for (std::size_t pos = 0; pos < count; ++pos) {
    const std::size_t i = order[pos];
    if (pos > 0 && std::equal(key(i), key(i) + static_cast<std::ptrdiff_t>(d), key(order[pos - 1])))
      throw ConfigError("grid.modes", "duplicate momentum vector");
    double k2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double k = momenta[i * d + a];
      if (!std::isfinite(k)) throw ConfigError("grid.modes", "non-finite momentum");
      grid.momenta_.push_back(k);
      k2 += k * k;
    }
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw NonpositiveWeight("mode " + std::to_string(pos) + " has weight " +
                              std::to_string(weights[i]));
    if (!std::isfinite(chi_b[i])) throw InvalidCutoff("chi_b is not finite on the grid");
    const double omega = std::sqrt(k2 + mass * mass);
    if (!(omega > 0.0))
      throw ZeroFrequencyMode("mode with |k| = 0 at m = 0 has omega = 0; exclude k = 0 from the grid");
    grid.weights_.push_back(weights[i]);
    grid.omega_.push_back(omega);
    grid.chi_b_.push_back(chi_b[i]);
    grid.rho_.push_back(chi_b[i] / std::sqrt(omega));
  }
  return grid;
}

double ModeGrid::min_omega() const { return *std::min_element(omega_.begin(), omega_.end()); }

bool ModeGrid::is_reflection_symmetric(double tol) const {
  const auto d = static_cast<std::size_t>(dimension_);
  for (std::size_t i = 0; i < size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < size() && !found; ++j) {
      bool mirrored = true;
      for (std::size_t a = 0; a < d; ++a)
        mirrored = mirrored && std::abs(momenta_[i * d + a] + momenta_[j * d + a]) <= tol;
      found = mirrored && std::abs(weights_[i] - weights_[j]) <= tol &&
              std::abs(chi_b_[i] - chi_b_[j]) <= tol;
    }
    if (!found) return false;
  }
  return true;
}

SpatialQuadrature SpatialQuadrature::from_nodes(int dimension, std::vector<double> nodes,
                                                std::vector<double> weights,
                                                std::vector<double> chi_values) {
  if (dimension < 1) throw ConfigError("quadrature.dimension", "must be positive");
  if (nodes.size() != weights.size() * static_cast<std::size_t>(dimension) ||
      chi_values.size() != weights.size() || weights.empty())
    throw ConfigError("quadrature", "inconsistent node, weight and value counts");
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw NonpositiveWeight("quadrature node " + std::to_string(j) + " has nonpositive weight");
    if (!std::isfinite(chi_values[j])) throw InvalidCutoff("chi_I is not finite at a node");
    if (chi_values[j] < 0.0)
      throw NegativeSpatialCutoff("chi_I(x_" + std::to_string(j) + ") = " +
                                  std::to_string(chi_values[j]) + " < 0; chi_I must be nonnegative");
  }
  SpatialQuadrature q;
  q.dimension_ = dimension;
  q.nodes_ = std::move(nodes);
  q.weights_ = std::move(weights);
  q.chi_values_ = std::move(chi_values);
  return q;
}

double SpatialQuadrature::integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j < size(); ++j) s += weights_[j] * chi_values_[j];
  return s;
}

double SpatialQuadrature::l1_norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < size(); ++j) s += weights_[j] * std::abs(chi_values_[j]);
  return s;
}

ModeGrid build_grid(const ModelParams& params) {
  const int d = params.dimension;
  std::vector<double> momenta;
  std::vector<double> weights;
  if (!params.grid.explicit_modes.empty()) {
    momenta = params.grid.explicit_modes;
    weights = params.grid.explicit_weights;
  } else {
    const int n = params.grid.points_per_axis;
    if (n < 1) throw ConfigError("grid.points", "must be >= 1");
    if (!(params.grid.cutoff > 0.0)) throw ConfigError("grid.K", "must be > 0");
    const double dk = 2.0 * params.grid.cutoff / n;
    std::vector<double> axis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = -params.grid.cutoff + (i + 0.5) * dk;
    std::vector<double> axis_w(static_cast<std::size_t>(n), dk);
    tensor_product(d, axis, axis_w, momenta, weights);
  }
  std::vector<double> chi;
  const std::size_t count = momenta.size() / static_cast<std::size_t>(std::max(d, 1));
  chi.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    chi.push_back(params.chi_b.evaluate(momenta.data() + i * static_cast<std::size_t>(d), d));
  return ModeGrid::from_modes(d, params.mass, std::move(momenta), std::move(weights), std::move(chi));
}

double cutoff_norm(const ModeGrid& grid, double exponent) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = grid.chi_b()[i];
    s += grid.weights()[i] * c * c / std::pow(grid.omega()[i], 2.0 * exponent);
  }
  return std::sqrt(s);
}

SpatialQuadrature build_spatial_quadrature(const ModelParams& params) {
  const int d = params.dimension;
  const int n = params.quadrature.nodes_per_axis;
  if (n < 1) throw ConfigError("quadrature.nodes", "must be >= 1");
  const CutoffSpec& chi = params.chi_I;
  if (chi.kind == CutoffKind::gaussian && !(chi.sigma > 0.0))
    throw ConfigError("chi_I.sigma", "must be > 0");
  if (!chi.center.empty() && chi.center.size() != static_cast<std::size_t>(d))
    throw ConfigError("chi_I.center", "needs one coordinate per dimension");

  // All axes share the same interval length; nodes are offset per axis below.
  const auto [lo0, hi0] = chi.support_interval(0);
  const double length = hi0 - lo0;
  std::vector<double> unit_points(static_cast<std::size_t>(n));
  std::vector<double> unit_weights(static_cast<std::size_t>(n));
  if (!(length > 0.0)) throw ConfigError("chi_I", "support has zero length");
  if (n == 1) {
    unit_points[0] = 0.5;
    unit_weights[0] = length;
  } else if (params.quadrature.rule == "trapezoid") {
    const double h = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j) {
      unit_points[static_cast<std::size_t>(j)] = j * h;
      unit_weights[static_cast<std::size_t>(j)] = (j == 0 || j == n - 1 ? 0.5 : 1.0) * h * length;
    }
  } else if (params.quadrature.rule == "midpoint") {
    const double h = 1.0 / n;
    for (int j = 0; j < n; ++j) {
      unit_points[static_cast<std::size_t>(j)] = (j + 0.5) * h;
      unit_weights[static_cast<std::size_t>(j)] = h * length;
    }
  } else {
    throw ConfigError("quadrature.rule", "unknown rule '" + params.quadrature.rule + "'");
  }

  std::vector<double> unit_nodes;
  std::vector<double> weights;
  tensor_product(d, unit_points, unit_weights, unit_nodes, weights);
  std::vector<double> nodes(unit_nodes.size());
  std::vector<double> values(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    for (int a = 0; a < d; ++a) {
      const auto [lo, hi] = chi.support_interval(a);
      const std::size_t k = j * static_cast<std::size_t>(d) + static_cast<std::size_t>(a);
      nodes[k] = lo + unit_nodes[k] * (hi - lo);
    }
    values[j] = chi.evaluate(nodes.data() + j * static_cast<std::size_t>(d), d);
  }
  auto quad = SpatialQuadrature::from_nodes(d, std::move(nodes), std::move(weights), std::move(values));
  if (chi.kind == CutoffKind::gaussian) {
    const double mass = chi.scale * std::pow(chi.sigma * std::sqrt(2.0 * M_PI), d);
    quad.set_truncation_error(mass * (1.0 - std::pow(std::erf(6.0 / std::sqrt(2.0)), d)));
  }
  return quad;
}

std::vector<std::pair<double, double>> read_cutoff_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open cutoff table '" + path + "'");
  std::vector<std::pair<double, double>> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double point = 0.0;
    double value = 0.0;
    if (!(fields >> point)) continue;
    std::string extra;
    if (!(fields >> value) || (fields >> extra))
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected two columns");
    if (!std::isfinite(point) || !std::isfinite(value))
      throw FormatError(path + ":" + std::to_string(lineno) + ": non-finite entry");
    table.emplace_back(point, value);
  }
  std::sort(table.begin(), table.end());
  for (std::size_t i = 1; i < table.size(); ++i)
    if (table[i].first == table[i - 1].first)
      throw FormatError(path + ": duplicate table point " + std::to_string(table[i].first));
  if (table.empty()) throw FormatError(path + ": empty cutoff table");
  return table;
}

}  // namespace phi4lab
