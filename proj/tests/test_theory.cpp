#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dense_oracle.h"
#include "fixtures.h"
#include "phi4lab/errors.h"
#include "phi4lab/spectral.h"
#include "phi4lab/theory.h"
#include "phi4lab/verify.h"

using namespace phi4lab;

namespace {

Lemma31Constants dense_lemma(const Model& m) {
  const oracle::Space sp(m.b());
  const auto hi = oracle::interaction(sp, m.g(), m.q());
  const auto h0 = oracle::free_hamiltonian(sp, m.g());
  Eigen::VectorXcd w = hi.col(0);
  w[0] = 0.0;
  Eigen::VectorXcd r = w;
  for (Eigen::Index s = 1; s < r.size(); ++s) r[s] /= h0(s, s);
  return {r.squaredNorm(), w.dot(r).real(), r.dot(hi * r).real()};
}

}  // namespace

TEST_CASE("first-order coefficient") {
  CHECK(first_order_coefficient(fixtures::unit_oscillator(4).g(), fixtures::unit_oscillator(4).q()) ==
        doctest::Approx(0.75).epsilon(1e-15));

  ModelParams p = fixtures::small_params({-0.7, 1.2}, {0.6, 0.9}, 4);
  p.chi_I.scale = 0.0;
  const Model zero = build_model(p);
  CHECK(first_order_coefficient(zero.g(), zero.q()) == 0.0);

  const Model m = fixtures::two_modes(4);
  const double direct = vacuum(m.b()).dot(apply_HI(m, vacuum(m.b()))).real();
  CHECK(std::abs(first_order_coefficient(m.g(), m.q()) - direct) <= 1e-12 * direct);
}

TEST_CASE("second-order constants match the dense construction") {
  const Model m = fixtures::two_modes(8);
  const Lemma31Constants lc = lemma31_constants(m.b(), m.g(), m.q());
  const Lemma31Constants dc = dense_lemma(m);
  CHECK(lc.nu0 == doctest::Approx(dc.nu0).epsilon(1e-12));
  CHECK(lc.a == doctest::Approx(dc.a).epsilon(1e-12));
  CHECK(lc.b == doctest::Approx(dc.b).epsilon(1e-12));
  CHECK(lc.nu0 >= 0.0);
  CHECK(lc.a >= 0.0);
  CHECK(lc.b >= 0.0);

  CHECK_THROWS_AS(lemma31_constants(fixtures::two_modes(7).b(), m.g(), m.q()), TruncationTooSmall);

  ModelParams p = fixtures::small_params({-0.7, 1.2}, {0.6, 0.9}, 8);
  p.chi_I.scale = 0.0;
  const Model zero = build_model(p);
  const Lemma31Constants z = lemma31_constants(zero.b(), zero.g(), zero.q());
  CHECK(z.nu0 == 0.0);
  CHECK(z.a == 0.0);
  CHECK(z.b == 0.0);
}

TEST_CASE("upper bounds on the reference model") {
  const ModelParams p = fixtures::reference_params();
  const Model m = build_model(p);
  const TheoryConstants tc = theory_constants(m.g(), m.q(), &m.b());
  REQUIRE(tc.lemma);
  CHECK(paper_upper_bound(0.0, tc.c1, *tc.lemma) == 0.0);
  CHECK(rayleigh_upper_bound(0.0, tc.c1, *tc.lemma) == 0.0);
  const double tiny = 1e-9;
  CHECK(paper_upper_bound(tiny, tc.c1, *tc.lemma) ==
        doctest::Approx(tiny * tc.c1 / (1.0 + tc.lemma->nu0)).epsilon(1e-7));

  // Frozen regression value of the displayed bound at kappa = 0.1.
  CHECK(paper_upper_bound(0.1, tc.c1, *tc.lemma) == doctest::Approx(0.23669580730648529).epsilon(1e-12));

  const HamiltonianSet hs(m);
  for (double k : {0.01, 0.05, 0.1, 0.2}) {
    const FockVector trial = rayleigh_trial_vector(m.b(), m.g(), m.q(), k);
    const double rq = rayleigh_quotient(hs.Hkappa(k), trial);
    const double rb = rayleigh_upper_bound(k, tc.c1, *tc.lemma);
    CHECK(std::abs(rb - rq) <= 1e-12 * std::abs(rq));
    const SpectralResult g = ground_state(hs.Hkappa(k), m.b(), lanczos_options(p));
    CHECK(g.E0 <= rb + 1e-10);
  }
}

TEST_CASE("H-bound constants") {
  const Model osc = fixtures::unit_oscillator(4);
  const HBoundConstants one = hbound_constants(osc.g(), osc.q());
  CHECK(one.c_bos == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(one.d_bos == doctest::Approx(1.0).epsilon(1e-15));

  ModelParams p = fixtures::small_params({-0.7, 1.2}, {0.6, 0.9}, 4);
  const Model base = build_model(p);
  p.chi_b.scale = 2.0;
  const Model doubled = build_model(p);
  const HBoundConstants hb = hbound_constants(base.g(), base.q());
  const HBoundConstants h2 = hbound_constants(doubled.g(), doubled.q());
  CHECK(h2.c_bos == doctest::Approx(16.0 * hb.c_bos).epsilon(1e-14));
  CHECK(h2.d_bos == doctest::Approx(16.0 * hb.d_bos).epsilon(1e-14));

  p.chi_I.scale = 0.0;
  const Model zero = build_model(p);
  const HBoundConstants hz = hbound_constants(zero.g(), zero.q());
  CHECK(hz.c_bos == 0.0);
  CHECK(hz.d_bos == 0.0);

  const TheoryConstants tc = theory_constants(base.g(), base.q(), nullptr);
  CHECK(hb.c_bos == doctest::Approx(16.0 * tc.chiI_L1 * std::pow(tc.norm_chi_b * tc.norm_chi_b_omega, 2)).epsilon(1e-14));
  CHECK(hb.d_bos == doctest::Approx(tc.chiI_L1 * std::pow(tc.norm_chi_b * tc.norm_chi_b_sqrt_omega, 2)).epsilon(1e-14));
  CHECK(!tc.lemma);
}

TEST_CASE("epsilon family limits") {
  const Model m = fixtures::two_modes(4);
  const HBoundConstants hb = hbound_constants(m.g(), m.q());
  const EpsilonFamily small_eps = epsilon_family(1e-12, 0.1, 0.3, m.g(), m.q());
  CHECK(small_eps.lambda == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(small_eps.mu > 1e9);
  CHECK(std::isfinite(small_eps.mu));

  double prev_c = INFINITY;
  for (double k : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const EpsilonFamily f = epsilon_family(0.5, k, 0.0, m.g(), m.q());
    CHECK(f.lambda >= 1.0);
    CHECK(f.mu >= 0.0);
    CHECK(f.c_number < prev_c);
    prev_c = f.c_number;
  }
  CHECK(prev_c < 1e-6);

  CHECK_THROWS_AS(epsilon_family(1.0 / (hb.c_bos * 0.1), 0.1, 0.0, m.g(), m.q()), EpsilonOutOfRange);
  CHECK_THROWS_AS(epsilon_family(0.0, 0.1, 0.0, m.g(), m.q()), EpsilonOutOfRange);
  CHECK_THROWS_AS(epsilon_family(0.1, -0.1, 0.0, m.g(), m.q()), EpsilonOutOfRange);
}

TEST_CASE("optimized epsilon") {
  const ModelParams p = fixtures::reference_params();
  const Model m = build_model(p);
  const HBoundConstants hb = hbound_constants(m.g(), m.q());
  const double kappa = 0.05;
  const double E0 = 0.57815013293446893;  // reference ground energy at this kappa
  const EpsilonOptimum opt = optimize_epsilon(kappa, E0, m.g(), m.q());
  CHECK(!opt.degenerate);
  CHECK(opt.c_number == doctest::Approx(13982.043733238452).epsilon(1e-10));

  // No point of a 1000-point scan of the admissible interval beats the optimizer.
  const double hi = 1.0 / (hb.c_bos * kappa);
  double best = INFINITY;
  for (int i = 1; i <= 1000; ++i) {
    const double eps = hi * i / 1001.0;
    best = std::min(best, epsilon_family(eps, kappa, E0, m.g(), m.q()).c_number);
  }
  CHECK(opt.c_number <= best * (1.0 + 1e-6));

  const EpsilonOptimum half = optimize_epsilon(kappa / 2.0, E0, m.g(), m.q());
  CHECK(half.c_number < opt.c_number);

  ModelParams z = fixtures::small_params({-0.7, 1.2}, {0.6, 0.9}, 4);
  z.chi_I.scale = 0.0;
  const Model zero = build_model(z);
  const EpsilonOptimum deg = optimize_epsilon(0.1, 0.0, zero.g(), zero.q());
  CHECK(deg.degenerate);
  CHECK(deg.epsilon == 1.0);
  CHECK(deg.c_number == doctest::Approx(epsilon_family(0.01, 0.1, 0.0, zero.g(), zero.q()).c_number));
}
