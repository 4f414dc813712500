#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.h"
#include "phi4lab/errors.h"
#include "phi4lab/grid.h"

using namespace phi4lab;

TEST_CASE("single zero mode has omega equal to the mass") {
  const auto g = ModeGrid::from_modes(1, 1.0, {0.0}, {1.0}, {1.0});
  CHECK(g.omega()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.rho()[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("massless zero mode is rejected") {
  CHECK_THROWS_AS(ModeGrid::from_modes(1, 0.0, {-1.0, 0.0, 1.0}, {1, 1, 1}, {1, 1, 1}), ZeroFrequencyMode);
}

TEST_CASE("dispersion at unit momentum") {
  const auto g = ModeGrid::from_modes(1, 1.0, {1.0, -1.0}, {1, 1}, {1, 1});
  for (double w : g.omega()) CHECK(w == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(g.momentum(0)[0] == -1.0);  // sorted by momentum
  CHECK(g.is_reflection_symmetric());
}

TEST_CASE("nonpositive weights and negative spatial cutoff are rejected") {
  CHECK_THROWS_AS(ModeGrid::from_modes(1, 1.0, {0.0}, {0.0}, {1.0}), NonpositiveWeight);
  CHECK_THROWS_AS(SpatialQuadrature::from_nodes(1, {0.0}, {1.0}, {-0.5}), NegativeSpatialCutoff);
}

TEST_CASE("cutoff norms") {
  const auto one = ModeGrid::from_modes(1, 1.0, {0.0}, {1.0}, {1.0});
  for (double p : {0.0, 0.5, 1.0, 1.5}) CHECK(cutoff_norm(one, p) == doctest::Approx(1.0).epsilon(1e-15));

  // omega = {1, 4}
  const auto two = ModeGrid::from_modes(1, 1.0, {0.0, std::sqrt(15.0)}, {1, 1}, {1, 1});
  CHECK(cutoff_norm(two, 1.0) == doctest::Approx(std::sqrt(1.0 + 1.0 / 16.0)).epsilon(1e-14));
  CHECK(cutoff_norm(two, 1.0) == doctest::Approx(1.03077641).epsilon(1e-8));
}

TEST_CASE("cutoff norm on a fine grid matches a ten times finer quadrature") {
  ModelParams p;
  p.mass = 1.0;
  p.grid.cutoff = 8.0;
  p.grid.points_per_axis = 400;
  p.chi_b.kind = CutoffKind::gaussian;
  p.chi_b.sigma = 1.0;
  const auto g = build_grid(p);

  // Trapezoid with 10x more panels on the same interval; the integrand is
  // negligible at the ends.
  const int n = 4000;
  const double h = 16.0 / n;
  for (double e : {0.0, 0.5, 1.0, 1.5}) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double k = -8.0 + i * h;
      const double c = std::exp(-k * k / 2.0);
      s += (i == 0 || i == n ? 0.5 : 1.0) * h * c * c / std::pow(std::sqrt(k * k + 1.0), 2.0 * e);
    }
    CHECK(cutoff_norm(g, e) == doctest::Approx(std::sqrt(s)).epsilon(1e-6));
  }
}

TEST_CASE("trapezoid quadrature of an indicator") {
  ModelParams p;
  p.chi_I.kind = CutoffKind::indicator;
  p.chi_I.radius = 1.0;
  p.quadrature.nodes_per_axis = 3;
  p.quadrature.rule = "trapezoid";
  const auto q = build_spatial_quadrature(p);
  REQUIRE(q.size() == 3);
  CHECK(q.node(0)[0] == -1.0);
  CHECK(q.node(1)[0] == 0.0);
  CHECK(q.node(2)[0] == 1.0);
  CHECK(q.weights()[0] == 0.5);
  CHECK(q.weights()[1] == 1.0);
  CHECK(q.integral() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("zero spatial cutoff") {
  ModelParams p;
  p.chi_I.scale = 0.0;
  const auto q = build_spatial_quadrature(p);
  for (double c : q.chi_values()) CHECK(c == 0.0);
  CHECK(q.integral() == 0.0);
}

TEST_CASE("gaussian spatial cutoff integral") {
  for (int d : {1, 2}) {
    ModelParams p;
    p.dimension = d;
    p.chi_I.kind = CutoffKind::gaussian;
    p.chi_I.sigma = 0.7;
    p.chi_I.scale = 1.3;
    p.quadrature.nodes_per_axis = 33;
    const auto q = build_spatial_quadrature(p);
    const double exact = 1.3 * std::pow(0.7 * std::sqrt(2.0 * M_PI), d);
    CHECK(q.integral() == doctest::Approx(exact).epsilon(1e-8));
    CHECK(q.truncation_error() < 1e-8 * exact);
  }
}

TEST_CASE("uniform grid layout") {
  ModelParams p;
  p.dimension = 2;
  p.grid.cutoff = 3.0;
  p.grid.points_per_axis = 3;
  p.chi_b.radius = 10.0;
  const auto g = build_grid(p);
  CHECK(g.size() == 9);
  double total = 0.0;
  for (double w : g.weights()) total += w;
  CHECK(total == doctest::Approx(36.0).epsilon(1e-14));
  CHECK(g.min_omega() == doctest::Approx(1.0).epsilon(1e-15));
}
