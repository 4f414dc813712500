#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dense_oracle.h"
#include "fixtures.h"
#include "phi4lab/errors.h"
#include "phi4lab/spectral.h"
#include "phi4lab/verify.h"

using namespace phi4lab;

TEST_CASE("kappa zero gives the vacuum") {
  const Model m = fixtures::two_modes(4);
  const HamiltonianSet hs(m);
  LanczosOptions lo;
  const SpectralResult r = ground_state(hs.Hkappa(0.0), m.b(), lo);
  CHECK(std::abs(r.E0) < 1e-12);
  CHECK(r.residual <= lo.tol);
  CHECK(std::abs(r.ground_vector[0] - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("unit oscillator ground energy matches dense diagonalization") {
  const Model m = fixtures::unit_oscillator(12);
  const HamiltonianSet hs(m);
  const SpectralResult r = ground_state(hs.Hkappa(0.1), m.b(), LanczosOptions{});
  const oracle::Space sp(m.b());
  const auto h = oracle::free_hamiltonian(sp, m.g()) + 0.1 * oracle::interaction(sp, m.g(), m.q());
  CHECK(std::abs(r.E0 - oracle::lowest_eigenvalue(h)) <= 1e-10);
  CHECK(r.ground_vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.ground_vector[0].imag() == 0.0);
  CHECK(r.ground_vector[0].real() >= 0.0);
}

TEST_CASE("ground energy is nondecreasing in kappa and sandwiched") {
  const Model m = fixtures::two_modes(6);
  const HamiltonianSet hs(m);
  const oracle::Space sp(m.b());
  const auto h0 = oracle::free_hamiltonian(sp, m.g());
  const auto hi = oracle::interaction(sp, m.g(), m.q());
  const double c1 = hi(0, 0).real();
  double prev = -1.0;
  for (double k : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    const SpectralResult r = ground_state(hs.Hkappa(k), m.b(), LanczosOptions{});
    CHECK(std::abs(r.E0 - oracle::lowest_eigenvalue(h0 + k * hi)) <= 1e-10);
    CHECK(r.E0 >= prev - 1e-12);
    CHECK(r.E0 >= -1e-12);
    CHECK(r.E0 <= k * c1 + 1e-12);
    prev = r.E0;
  }
}

TEST_CASE("fixed seed is bitwise reproducible") {
  const Model m = fixtures::two_modes(6);
  const HamiltonianSet hs(m);
  const SpectralResult a = ground_state(hs.Hkappa(0.2), m.b(), LanczosOptions{});
  const SpectralResult b = ground_state(hs.Hkappa(0.2), m.b(), LanczosOptions{});
  CHECK(a.E0 == b.E0);
  CHECK((a.ground_vector - b.ground_vector).norm() == 0.0);
}

TEST_CASE("shifted solves") {
  const Model m = fixtures::two_modes(4);
  const HamiltonianSet hs(m);
  ShiftedSolveOptions so;
  const FockVector om = vacuum(m.b());
  CHECK((solve_shifted(hs.H0(), 1.0, om, so) - om).norm() < 1e-14);

  SampleStream rs(21, "diag");
  const FockVector rhs = rs.interior_vector(m.b(), 4);
  const FockVector x = solve_shifted(hs.H0(), 0.5, rhs, so);
  for (std::size_t s = 0; s < m.b().dim(); ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < 2; ++i) e += m.b().occupation(s)[i] * m.g().omega()[i];
    const auto k = static_cast<Eigen::Index>(s);
    CHECK(std::abs(x[k] - rhs[k] / (e + 0.5)) <= 1e-12 * std::abs(rhs[k]) + 1e-15);
  }

  const auto hk = hs.Hkappa(0.2);
  const SpectralResult g = ground_state(hk, m.b(), LanczosOptions{});
  for (std::size_t i = 0; i < m.g().size(); ++i) {
    const double shift = -g.E0 + m.g().omega()[i];
    const FockVector y = solve_shifted(hk, shift, rhs, so);
    CHECK((hk(y) + shift * y - rhs).norm() <= so.tol * rhs.norm());
  }
  CHECK_THROWS_AS(solve_shifted(hk, -g.E0 - 0.1, rhs, so), IndefiniteShift);
}

TEST_CASE("Rayleigh quotients") {
  const Model m = fixtures::two_modes(6);
  const HamiltonianSet hs(m);
  const auto hk = hs.Hkappa(0.15);
  const FockVector om = vacuum(m.b());
  const double c1 = om.dot(apply_HI(m, om)).real();
  CHECK(rayleigh_quotient(hk, om) == doctest::Approx(0.15 * c1).epsilon(1e-14));

  const SpectralResult g = ground_state(hk, m.b(), LanczosOptions{});
  CHECK(std::abs(rayleigh_quotient(hk, g.ground_vector) - g.E0) <= g.residual);
  SampleStream rs(30, "rq");
  for (int k = 0; k < 100; ++k) CHECK(rayleigh_quotient(hk, rs.interior_vector(m.b(), 6)) >= g.E0 - 1e-10);
  CHECK_THROWS_AS(rayleigh_quotient(hk, FockVector::Zero(om.size())), ZeroVector);
}
