#include "phi4lab/verify.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "phi4lab/errors.h"

namespace phi4lab {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();
// Terms below this fraction of the state norm are round-off, not signal.
constexpr double kRoundoffFloor = 1e-8;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

FockVector ann(const Model& m, const ModeFunction& f, const FockVector& v) {
  return apply_smeared(m.b(), m.g(), f, v, Smearing::annihilate);
}
FockVector cre(const Model& m, const ModeFunction& f, const FockVector& v) {
  return apply_smeared(m.b(), m.g(), f, v, Smearing::create);
}
FockVector phi(const Model& m, const ModeFunction& f, const FockVector& v) {
  return apply_smeared(m.b(), m.g(), f, v, Smearing::segal);
}
FockVector h0(const Model& m, const FockVector& v) { return apply_dgamma_omega(m.b(), m.g(), v); }

FockVector field_power(const Model& m, const ModeFunction& f, FockVector v, int power) {
  for (int i = 0; i < power; ++i) v = phi(m, f, v);
  return v;
}

ModeFunction times_omega(const ModeGrid& grid, const ModeFunction& f, double power) {
  ModeFunction out = f;
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] *= std::pow(grid.omega()[static_cast<std::size_t>(i)], power);
  return out;
}

double fn_norm(const ModeGrid& grid, const ModeFunction& f) { return std::sqrt(inner(grid, f, f).real()); }

double ratio(double num, double den) { return den > 0.0 ? num / den : (num > 0.0 ? num / kTiny : 0.0); }

// Residual-type outcome from a list of relative residuals.
CheckOutcome residual_outcome(std::string name, std::vector<double> measured, double tol, std::string context) {
  CheckOutcome out;
  out.name = std::move(name);
  out.threshold = tol;
  out.measured = std::move(measured);
  out.context = std::move(context);
  const double w = out.worst();
  out.slack = tol - w;
  out.status = w <= tol ? CheckStatus::pass : CheckStatus::fail;
  return out;
}

// Tracks min relative slack of lhs <= rhs over samples.
struct InequalityTally {
  std::vector<double> measured;  // lhs / rhs per sample
  double slack = std::numeric_limits<double>::infinity();
  void add(double lhs, double rhs, double floor = 0.0) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), floor});
    const double s = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
    slack = std::min(slack, s);
    measured.push_back(ratio(lhs, rhs));
  }
  CheckOutcome finish(std::string name, double tol, std::string context) {
    CheckOutcome out;
    out.name = std::move(name);
    out.threshold = tol;
    out.measured = std::move(measured);
    out.context = std::move(context);
    if (out.measured.empty()) {
      out.status = CheckStatus::skipped;
      out.slack = 0.0;
      return out;
    }
    out.slack = slack;
    out.status = slack >= -tol ? CheckStatus::pass : CheckStatus::fail;
    return out;
  }
};

CheckOutcome skipped(std::string name, std::string why) {
  CheckOutcome out;
  out.name = std::move(name);
  out.status = CheckStatus::skipped;
  out.context = std::move(why);
  return out;
}

std::string interior_note(const Model& m, int reach) {
  return "N_max=" + std::to_string(m.b().n_max()) + ", vectors in grades <= N_max-" + std::to_string(reach);
}

}  // namespace

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::pass_with_caveat: return "pass_with_caveat";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

double CheckOutcome::worst() const {
  double w = 0.0;
  for (double x : measured) w = std::max(w, x);
  return w;
}

bool all_ok(const std::vector<CheckOutcome>& checks) {
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return false;
  return true;
}

SampleStream::SampleStream(std::uint64_t seed, const std::string& label)
    : rng_(splitmix(seed ^ splitmix(fnv1a(label)))) {}

FockVector SampleStream::interior_vector(const FockBasis& basis, int max_grade_kept) {
  FockVector v = FockVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  if (max_grade_kept < 0) return v;
  const std::size_t end = basis.grade_begin(std::min(max_grade_kept, basis.n_max()) + 1);
  for (std::size_t s = 0; s < end; ++s) {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    v[static_cast<Eigen::Index>(s)] = Complex(re, im);
  }
  return v / v.norm();
}

ModeFunction SampleStream::mode_function(const ModeGrid& grid) {
  ModeFunction f(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    f[i] = Complex(re, im);
  }
  return f;
}

std::size_t SampleStream::index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

Complex inner(const ModeGrid& grid, const ModeFunction& f, const ModeFunction& g) {
  Complex s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += grid.weights()[static_cast<std::size_t>(i)] * std::conj(f[i]) * g[i];
  return s;
}

// ---- identities ----

CheckOutcome check_ccr(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 2;
  if (top < 0) return skipped("ccr_mixed", "N_max < 2");
  SampleStream rs(seed, "ccr_mixed");
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const ModeFunction g = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector x = ann(m, f, cre(m, g, v));
    const FockVector y = cre(m, g, ann(m, f, v));
    const Complex fg = inner(m.g(), f, g);
    res.push_back(ratio((x - y - fg * v).norm(), x.norm() + y.norm() + std::abs(fg)));
  }
  return residual_outcome("ccr_mixed", std::move(res), tol, interior_note(m, 2));
}

CheckOutcome check_ccr_same(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 2;
  if (top < 0) return skipped("ccr_same", "N_max < 2");
  SampleStream rs(seed, "ccr_same");
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const ModeFunction g = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector a1 = ann(m, f, ann(m, g, v));
    const FockVector a2 = ann(m, g, ann(m, f, v));
    const FockVector c1 = cre(m, f, cre(m, g, v));
    const FockVector c2 = cre(m, g, cre(m, f, v));
    res.push_back(std::max(ratio((a1 - a2).norm(), a1.norm() + a2.norm()),
                           ratio((c1 - c2).norm(), c1.norm() + c2.norm())));
  }
  return residual_outcome("ccr_same", std::move(res), tol, interior_note(m, 2));
}

CheckOutcome check_commutator_a(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 1;
  if (top < 0) return skipped("commutator_a_h0", "N_max < 1");
  SampleStream rs(seed, "commutator_a_h0");
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector x = ann(m, f, h0(m, v));
    const FockVector y = h0(m, ann(m, f, v));
    const FockVector r = ann(m, times_omega(m.g(), f, 1.0), v);
    res.push_back(ratio((x - y - r).norm(), x.norm() + y.norm() + r.norm()));
  }
  return residual_outcome("commutator_a_h0", std::move(res), tol, interior_note(m, 1));
}

CheckOutcome check_commutator_adag(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 1;
  if (top < 0) return skipped("commutator_adag_h0", "N_max < 1");
  SampleStream rs(seed, "commutator_adag_h0");
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector x = cre(m, f, h0(m, v));
    const FockVector y = h0(m, cre(m, f, v));
    const FockVector r = cre(m, times_omega(m.g(), f, 1.0), v);
    res.push_back(ratio((x - y + r).norm(), x.norm() + y.norm() + r.norm()));
  }
  return residual_outcome("commutator_adag_h0", std::move(res), tol, interior_note(m, 1));
}

CheckOutcome check_commutator_phi(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 1;
  if (top < 0) return skipped("commutator_phi_h0", "N_max < 1");
  SampleStream rs(seed, "commutator_phi_h0");
  const Complex I(0.0, 1.0);
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector x = phi(m, f, h0(m, v));
    const FockVector y = h0(m, phi(m, f, v));
    const ModeFunction iwf = I * times_omega(m.g(), f, 1.0);
    const FockVector r = I * phi(m, iwf, v);
    res.push_back(ratio((x - y - r).norm(), x.norm() + y.norm() + r.norm()));
  }
  return residual_outcome("commutator_phi_h0", std::move(res), tol, interior_note(m, 1));
}

namespace {

// [phi(f)^2, H0] u
FockVector inner_commutator(const Model& m, const ModeFunction& f, const FockVector& u) {
  return field_power(m, f, h0(m, u), 2) - h0(m, field_power(m, f, u, 2));
}

}  // namespace

CheckOutcome check_double_commutator(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 4;
  if (top < 0) return skipped("double_commutator", "N_max < 4");
  SampleStream rs(seed, "double_commutator");
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector x = field_power(m, f, inner_commutator(m, f, v), 2);
    const FockVector y = inner_commutator(m, f, field_power(m, f, v, 2));
    const double fwf = inner(m.g(), f, times_omega(m.g(), f, 1.0)).real();
    const FockVector r = -4.0 * fwf * field_power(m, f, v, 2);
    res.push_back(ratio((x - y - r).norm(), x.norm() + y.norm() + r.norm()));
  }
  return residual_outcome("double_commutator", std::move(res), tol, interior_note(m, 4));
}

CheckOutcome check_weak_commutator(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 4;
  if (top < 0) return skipped("weak_commutator", "N_max < 4");
  if (m.q().size() == 0) return skipped("weak_commutator", "no quadrature nodes");
  SampleStream rs(seed, "weak_commutator");
  std::vector<double> res;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector a = rs.interior_vector(m.b(), top);
    const FockVector b = rs.interior_vector(m.b(), top);
    const ModeFunction& rho_x = (*m.node_smearings)[rs.index(m.q().size())];
    // [phi(x)^4, a(f)]^0 (a, b) = (phi^4 a, a(f) b) - (a^dagger(f) a, phi^4 b)
    const FockVector p4a = field_power(m, rho_x, a, 4);
    const FockVector afb = ann(m, f, b);
    const FockVector cfa = cre(m, f, a);
    const FockVector p4b = field_power(m, rho_x, b, 4);
    const Complex lhs = p4a.dot(afb) - cfa.dot(p4b);
    const Complex rhs = -2.0 * std::sqrt(2.0) * inner(m.g(), f, rho_x) * a.dot(field_power(m, rho_x, b, 3));
    res.push_back(ratio(std::abs(lhs - rhs), p4a.norm() * afb.norm() + cfa.norm() * p4b.norm()));
  }
  return residual_outcome("weak_commutator", std::move(res), tol, interior_note(m, 4));
}

// ---- inequalities ----

CheckOutcome check_double_commutator_bound(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 4;
  if (top < 0) return skipped("double_commutator_bound", "N_max < 4");
  SampleStream rs(seed, "double_commutator_bound");
  InequalityTally tally;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const FockVector x = field_power(m, f, inner_commutator(m, f, v), 2) - inner_commutator(m, f, field_power(m, f, v, 2));
    const double lhs = std::abs(v.dot(x));
    const double w_half = std::pow(fn_norm(m.g(), times_omega(m.g(), f, 0.5)), 2);
    const double w_mhalf = std::pow(fn_norm(m.g(), times_omega(m.g(), f, -0.5)), 2);
    const double h0v = v.dot(h0(m, v)).real();
    const double rhs = 4.0 * w_half * (4.0 * w_mhalf * h0v + std::pow(fn_norm(m.g(), f), 2) * v.squaredNorm());
    tally.add(lhs, rhs);
  }
  return tally.finish("double_commutator_bound", tol, interior_note(m, 4));
}

CheckOutcome check_annihilation_bound(const Model& m, int samples, std::uint64_t seed, double tol) {
  SampleStream rs(seed, "annihilation_bound");
  InequalityTally tally;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), m.b().n_max());
    const double lhs = ann(m, f, v).norm();
    const double rhs = fn_norm(m.g(), times_omega(m.g(), f, -0.5)) * std::sqrt(v.dot(h0(m, v)).real());
    tally.add(lhs, rhs);
  }
  return tally.finish("annihilation_bound", tol, "N_max=" + std::to_string(m.b().n_max()) + ", all grades");
}

CheckOutcome check_creation_bound(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 1;
  if (top < 0) return skipped("creation_bound", "N_max < 1");
  SampleStream rs(seed, "creation_bound");
  InequalityTally tally;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const double lhs = cre(m, f, v).norm();
    const double rhs = fn_norm(m.g(), times_omega(m.g(), f, -0.5)) * std::sqrt(v.dot(h0(m, v)).real()) +
                       fn_norm(m.g(), f) * v.norm();
    tally.add(lhs, rhs);
  }
  return tally.finish("creation_bound", tol, interior_note(m, 1));
}

CheckOutcome check_field_bound(const Model& m, int samples, std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 1;
  if (top < 0) return skipped("field_bound", "N_max < 1");
  SampleStream rs(seed, "field_bound");
  InequalityTally tally;
  for (int n = 0; n < samples; ++n) {
    const ModeFunction f = rs.mode_function(m.g());
    const FockVector v = rs.interior_vector(m.b(), top);
    const double lhs = phi(m, f, v).norm();
    const double rhs = std::sqrt(2.0) * fn_norm(m.g(), times_omega(m.g(), f, -0.5)) * std::sqrt(v.dot(h0(m, v)).real()) +
                       fn_norm(m.g(), f) / std::sqrt(2.0) * v.norm();
    tally.add(lhs, rhs);
  }
  return tally.finish("field_bound", tol, interior_note(m, 1));
}

std::vector<CheckOutcome> check_hbound(const Model& m, double kappa, double epsilon, int samples,
                                       std::uint64_t seed, double tol) {
  const int top = m.b().n_max() - 8;
  if (top < 0) return {skipped("hbound", "N_max < 8"), skipped("hbound_lambda_mu", "N_max < 8")};
  const HBoundConstants hb = hbound_constants(m.g(), m.q());
  const EpsilonFamily fam = epsilon_family(epsilon, kappa, 0.0, m.g(), m.q());
  SampleStream rs(seed, "hbound");
  InequalityTally prop;
  InequalityTally cor;
  for (int n = 0; n < samples; ++n) {
    const FockVector v = rs.interior_vector(m.b(), top);
    const double h0sq = h0(m, v).squaredNorm();
    const FockVector hi = apply_HI(m, v);
    const double hisq = kappa * kappa * hi.squaredNorm();
    const double hksq = (h0(m, v) + kappa * hi).squaredNorm();
    const double vv = v.squaredNorm();
    prop.add((1.0 - hb.c_bos * epsilon * kappa) * h0sq + hisq,
             hksq + (4.0 * hb.d_bos + hb.c_bos / (4.0 * epsilon)) * kappa * vv);
    cor.add(h0sq + hisq, fam.lambda * hksq + fam.mu * vv);
  }
  const std::string ctx = interior_note(m, 8) + ", kappa=" + fmt(kappa) + ", epsilon=" + fmt(epsilon);
  return {prop.finish("hbound", tol, ctx), cor.finish("hbound_lambda_mu", tol, ctx)};
}

std::vector<CheckOutcome> check_phi3_bound(const Model& m, double kappa, double epsilon, int samples,
                                           std::uint64_t seed, const FockVector* psi, double tol) {
  const int top = m.b().n_max() - 8;
  if (top < 0) return {skipped("phi3_pointwise", "N_max < 8"), skipped("phi3_integrated", "N_max < 8")};
  const std::size_t nodes = m.q().size();
  const auto& sm = *m.node_smearings;

  // Fields at different nodes commute only when every (rho_x, rho_x') is real.
  double comm = 0.0;
  for (std::size_t j = 0; j < nodes; ++j)
    for (std::size_t l = 0; l < nodes; ++l) comm = std::max(comm, std::abs(inner(m.g(), sm[j], sm[l]).imag()));
  const bool commuting = comm <= 1e-12 * std::pow(cutoff_norm(m.g(), 0.5), 2);

  const EpsilonFamily fam = epsilon_family(epsilon, kappa, 0.0, m.g(), m.q());
  const double l1 = m.q().l1_norm();
  std::vector<FockVector> vectors;
  std::string source;
  if (psi) {
    FockVector v = project_to_grades(m.b(), *psi, top);
    if (v.norm() == 0.0) return {skipped("phi3_pointwise", "state has no interior weight"),
                                 skipped("phi3_integrated", "state has no interior weight")};
    vectors.push_back(v / v.norm());
    source = "ground state projected to the interior";
  } else {
    SampleStream rs(seed, "phi3_bound");
    for (int n = 0; n < samples; ++n) vectors.push_back(rs.interior_vector(m.b(), top));
    source = "random vectors";
  }

  InequalityTally point;
  InequalityTally integrated;
  for (const FockVector& v : vectors) {
    std::vector<FockVector> cube(nodes);
    std::vector<FockVector> quart(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
      cube[j] = field_power(m, sm[j], v, 3);
      quart[j] = phi(m, sm[j], cube[j]);
    }
    double lhs = 0.0;
    const double vv = v.squaredNorm();
    for (std::size_t j = 0; j < nodes; ++j) {
      const double cj = m.q().weights()[j] * m.q().chi_values()[j];
      for (std::size_t l = 0; l < nodes; ++l) {
        const double cl = m.q().weights()[l] * m.q().chi_values()[l];
        const double pair = std::abs(cube[j].dot(cube[l]));
        if (commuting) point.add(pair, quart[j].dot(quart[l]).real() + 0.5 * vv);
        lhs += cj * cl * pair;
      }
    }
    const FockVector hk = h0(m, v) + kappa * apply_HI(m, v);
    integrated.add(kappa * kappa * lhs, fam.lambda * hk.squaredNorm() + (fam.mu + 0.5 * kappa * kappa * l1 * l1) * vv);
  }
  const std::string ctx = interior_note(m, 8) + ", " + source + ", kappa=" + fmt(kappa) + ", epsilon=" + fmt(epsilon);
  CheckOutcome p = commuting ? point.finish("phi3_pointwise", tol, ctx)
                             : skipped("phi3_pointwise", "fields at different nodes do not commute on this grid (max |Im(rho_x, rho_y)| = " + fmt(comm) + ")");
  return {p, integrated.finish("phi3_integrated", tol, ctx)};
}

// ---- ground-state checks ----

CheckOutcome check_number_bound(const Model& m, const SpectralResult& state, double kappa, double c_eps_kappa,
                                double tol) {
  InequalityTally t;
  t.add(state.ground_vector.dot(apply_number(m.b(), state.ground_vector)).real(), c_eps_kappa,
        kRoundoffFloor * state.ground_vector.squaredNorm());
  return t.finish("number_bound", tol, "kappa=" + fmt(kappa) + ", c_eps_kappa=" + fmt(c_eps_kappa));
}

CheckOutcome check_number_sum(const Model& m, const SpectralResult& state, double tol) {
  const FockVector& v = state.ground_vector;
  const double direct = v.dot(apply_number(m.b(), v)).real();
  double sum = 0.0;
  for (std::size_t i = 0; i < m.b().modes(); ++i) sum += apply_mode_annihilation(m.b(), i, v).squaredNorm();
  return residual_outcome("number_mode_sum", {ratio(std::abs(direct - sum), std::max(direct, 1.0))}, tol,
                          "<N>=" + fmt(direct) + ", sum ||a_i Omega||^2=" + fmt(sum));
}

std::vector<CheckOutcome> check_overlap(const Model& m, const FockVector& v, std::optional<double> c_eps_kappa,
                                        double tol) {
  const double ov = std::abs(v[0]);
  const double n = v.dot(apply_number(m.b(), v)).real();
  std::vector<CheckOutcome> out;
  CheckOutcome basic;
  basic.name = "overlap_number";
  basic.threshold = tol;
  basic.measured = {ov * ov, 1.0 - n};
  basic.slack = ov * ov - (1.0 - n);
  basic.status = basic.slack >= -tol ? CheckStatus::pass : CheckStatus::fail;
  basic.context = "|(Omega0, Phi)|^2 >= 1 - <N>";
  out.push_back(basic);
  if (c_eps_kappa && *c_eps_kappa < 1.0) {
    CheckOutcome strong;
    strong.name = "overlap_c_eps";
    strong.threshold = tol;
    strong.measured = {ov, std::sqrt(1.0 - *c_eps_kappa)};
    strong.slack = ov - std::sqrt(1.0 - *c_eps_kappa);
    strong.status = strong.slack >= -tol ? CheckStatus::pass : CheckStatus::fail;
    strong.context = "|(Omega0, Phi)| >= sqrt(1 - c_eps_kappa), c_eps_kappa=" + fmt(*c_eps_kappa);
    out.push_back(strong);
  } else {
    out.push_back(skipped("overlap_c_eps", c_eps_kappa ? "c_eps_kappa >= 1" : "no c_eps_kappa"));
  }
  return out;
}

double PullThroughResult::max_relative() const {
  double w = 0.0;
  for (double r : relative) w = std::max(w, r);
  return w;
}

PullThroughResult check_pull_through(const Model& m, const SpectralResult& state, double kappa, double tol,
                                     const SolverSpec& solver, std::uint64_t seed) {
  const FockBasis& basis = m.b();
  const ModeGrid& grid = m.g();
  const SpatialQuadrature& quad = m.q();
  const auto& sm = *m.node_smearings;
  const FockVector& omega_k = state.ground_vector;
  const HamiltonianSet ops(m);
  const OperatorHandle H = ops.Hkappa(kappa);

  std::vector<FockVector> cubes(quad.size());
  for (std::size_t j = 0; j < quad.size(); ++j) cubes[j] = field_power(m, sm[j], omega_k, 3);

  ShiftedSolveOptions so;
  so.tol = solver.lin_tol;
  so.max_iter = solver.max_iter;
  so.spectrum_floor = state.E0 - state.residual;
  so.seed = seed;

  PullThroughResult out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FockVector lhs = apply_mode_annihilation(basis, i, omega_k) / std::sqrt(grid.weights()[i]);
    FockVector source = FockVector::Zero(omega_k.size());
    const auto k = grid.momentum(i);
    for (std::size_t j = 0; j < quad.size(); ++j) {
      const double cj = quad.weights()[j] * quad.chi_values()[j];
      if (cj == 0.0) continue;
      const auto x = quad.node(j);
      double phase = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) phase += k[a] * x[a];
      source += cj * Complex(std::cos(phase), -std::sin(phase)) * cubes[j];
    }
    FockVector y = FockVector::Zero(omega_k.size());
    if (kappa != 0.0) y = solve_shifted(H, grid.omega()[i] - state.E0, source, so);
    const double r = (lhs + 2.0 * std::sqrt(2.0) * kappa * grid.rho()[i] * y).norm();
    out.absolute.push_back(r);
    out.relative.push_back(r / std::max(lhs.norm(), kRoundoffFloor * omega_k.norm()));
  }

  // Norm of phi(x_j)^3 restricted to grades above N_max - 4, by power iteration on P phi^6 P.
  const int floor_grade = basis.n_max() - 4;
  SampleStream rs(seed, "pullthrough_top_norm");
  double best = 0.0;
  for (std::size_t j = 0; j < quad.size(); ++j) {
    FockVector v = rs.interior_vector(basis, basis.n_max());
    v -= project_to_grades(basis, v, floor_grade);
    if (v.norm() == 0.0) break;
    v /= v.norm();
    double est = 0.0;
    for (int it = 0; it < 60; ++it) {
      FockVector w = field_power(m, sm[j], field_power(m, sm[j], v, 3), 3);
      w -= project_to_grades(basis, w, floor_grade);
      const double nw = w.norm();
      if (nw == 0.0) break;
      est = nw;
      v = w / nw;
    }
    best = std::max(best, std::sqrt(est));
  }
  double rho_max = 0.0;
  for (double r : grid.rho()) rho_max = std::max(rho_max, std::abs(r));
  out.field_cube_norm = best;
  out.caveat_threshold = 32.0 * kappa * rho_max * quad.l1_norm() * best * std::sqrt(state.top_grade_weight);

  CheckOutcome& c = out.outcome;
  c.name = "pull_through";
  c.threshold = tol;
  c.measured = out.relative;
  const double worst = out.max_relative();
  c.slack = tol - worst;
  double worst_abs = 0.0;
  for (double r : out.absolute) worst_abs = std::max(worst_abs, r);
  c.context = "kappa=" + fmt(kappa) + ", N_max=" + std::to_string(basis.n_max()) + ", max absolute residual=" +
              fmt(worst_abs) + ", caveat bound C*sqrt(top_grade_weight)=" + fmt(out.caveat_threshold) +
              " with C = 32 kappa rho_max ||chi_I||_1 ||phi^3||_top, ||phi^3||_top=" + fmt(best);
  if (worst <= tol)
    c.status = CheckStatus::pass;
  else if (worst_abs <= out.caveat_threshold)
    c.status = CheckStatus::pass_with_caveat;
  else
    c.status = CheckStatus::fail;
  return out;
}

AraiResult check_arai_identities(const Model& m, const SpectralResult& state, double kappa, const SolverSpec& solver) {
  const double min_w = m.g().min_omega();
  if (!(state.E0 < min_w))
    throw SpectralConditionViolated("E0 = " + fmt(state.E0) + " is not below min omega = " + fmt(min_w));
  const Complex ov = state.ground_vector[0];
  if (ov == 0.0) throw SpectralConditionViolated("ground state has no vacuum component");
  const FockBasis& basis = m.b();
  const FockVector psi = state.ground_vector / ov;
  const FockVector hpsi = apply_HI(m, psi);

  AraiResult out;
  out.psi_tilde_norm = psi.norm();
  out.energy_residual = std::abs(state.E0 - kappa * hpsi[0]);

  const OperatorHandle h0perp{[&m, &basis](const FockVector& v) {
                                return project_vacuum(basis, apply_dgamma_omega(basis, m.g(), v),
                                                      VacuumProjection::P0perp);
                              },
                              true, "H0 on the vacuum complement", basis.dim()};
  ShiftedSolveOptions so;
  so.tol = solver.lin_tol;
  so.max_iter = solver.max_iter;
  so.spectrum_floor = min_w;
  const FockVector rhs = project_vacuum(basis, hpsi, VacuumProjection::P0perp);
  const FockVector y = solve_shifted(h0perp, -state.E0, rhs, so);
  out.vector_residual = (psi - vacuum(basis) + kappa * y).norm();

  const std::string ctx = "kappa=" + fmt(kappa) + ", E0=" + fmt(state.E0) + ", ||psi_tilde||=" + fmt(out.psi_tilde_norm);
  out.outcomes.push_back(residual_outcome("arai_energy", {out.energy_residual / std::max(1.0, state.E0)}, 1e-9, ctx));
  out.outcomes.push_back(residual_outcome("arai_vector", {out.vector_residual}, 1e-8, ctx));
  return out;
}

// ---- suites ----

std::vector<CheckOutcome> identity_suite(const Model& m, int samples, std::uint64_t seed) {
  return {check_ccr(m, samples, seed),           check_ccr_same(m, samples, seed),
          check_commutator_a(m, samples, seed),  check_commutator_adag(m, samples, seed),
          check_commutator_phi(m, samples, seed), check_double_commutator(m, samples, seed),
          check_weak_commutator(m, samples, seed)};
}

std::vector<CheckOutcome> inequality_suite(const Model& m, double kappa, double epsilon, int samples,
                                           std::uint64_t seed) {
  std::vector<CheckOutcome> out = {check_annihilation_bound(m, samples, seed), check_creation_bound(m, samples, seed),
                                   check_field_bound(m, samples, seed),
                                   check_double_commutator_bound(m, samples, seed)};
  for (auto& c : check_hbound(m, kappa, epsilon, samples, seed)) out.push_back(std::move(c));
  for (auto& c : check_phi3_bound(m, kappa, epsilon, samples, seed)) out.push_back(std::move(c));
  // Overlap inequality on random normalized vectors.
  SampleStream rs(seed, "overlap_random");
  InequalityTally t;
  for (int n = 0; n < samples; ++n) {
    const FockVector v = rs.interior_vector(m.b(), m.b().n_max());
    t.add(1.0 - v.dot(apply_number(m.b(), v)).real(), std::norm(v[0]));
  }
  out.push_back(t.finish("overlap_number_random", 1e-12, "N_max=" + std::to_string(m.b().n_max()) + ", all grades"));
  return out;
}

LanczosOptions lanczos_options(const ModelParams& params) {
  LanczosOptions o;
  o.tol = params.solver.eig_tol;
  o.max_iter = params.solver.max_iter;
  o.krylov_dim = params.solver.krylov_dim;
  o.seed = params.seed;
  o.degeneracy_rel = params.solver.degeneracy_rel;
  return o;
}

double resolve_epsilon(const ModelParams& params, const Model& m, double kappa, double E0) {
  if (params.epsilon_policy == EpsilonPolicy::fixed) return params.epsilon;
  return optimize_epsilon(kappa, E0, m.g(), m.q()).epsilon;
}

SweepRow solve_row(const Model& m, const ModelParams& params, const TheoryConstants& constants, double kappa,
                   SpectralResult* state_out) {
  SweepRow row;
  row.kappa = kappa;
  const HamiltonianSet ops(m);
  const SpectralResult state = ground_state(ops.Hkappa(kappa), m.b(), lanczos_options(params));
  row.E0 = state.E0;
  row.residual = state.residual;
  row.c1_kappa = kappa * constants.c1;
  row.e_abs = std::abs(state.E0 - row.c1_kappa);
  row.e_over_kappa = kappa > 0.0 ? row.e_abs / kappa : 0.0;
  row.top_grade_weight = state.top_grade_weight;
  row.warnings = state.warnings;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (constants.lemma) {
    row.rayleigh_bound = rayleigh_upper_bound(kappa, constants.c1, *constants.lemma);
    row.paper_bound = paper_upper_bound(kappa, constants.c1, *constants.lemma);
  } else {
    row.rayleigh_bound = nan;
    row.paper_bound = nan;
    row.warnings.push_back("second-order constants unavailable for N_max < 8");
  }
  const FockVector& v = state.ground_vector;
  row.n_expect = v.dot(apply_number(m.b(), v)).real();
  row.overlap = std::abs(v[0]);

  std::vector<CheckOutcome>& checks = row.checks;
  {
    // 0 <= E0 <= kappa c1
    const double tol = std::max(params.solver.eig_tol, 1e-12);
    CheckOutcome c;
    c.name = "energy_sandwich";
    c.threshold = tol;
    c.measured = {state.E0, row.c1_kappa};
    c.slack = std::min(state.E0, row.c1_kappa - state.E0);
    c.status = c.slack >= -tol ? CheckStatus::pass : CheckStatus::fail;
    c.context = "0 <= E0 <= kappa c1, kappa=" + fmt(kappa);
    checks.push_back(c);
  }
  if (constants.lemma) {
    CheckOutcome c;
    c.name = "rayleigh_bound";
    c.threshold = 1e-10;
    c.measured = {state.E0, row.rayleigh_bound};
    c.slack = row.rayleigh_bound - state.E0;
    c.status = c.slack >= -1e-10 ? CheckStatus::pass : CheckStatus::fail;
    c.context = "E0 <= Rayleigh quotient of the second-order trial vector, kappa=" + fmt(kappa);
    checks.push_back(c);
  } else {
    checks.push_back(skipped("rayleigh_bound", "N_max < 8"));
  }

  std::optional<double> c_eps;
  try {
    row.epsilon = resolve_epsilon(params, m, kappa, state.E0);
    row.c_eps_kappa = epsilon_family(row.epsilon, kappa, state.E0, m.g(), m.q()).c_number;
    c_eps = row.c_eps_kappa;
    checks.push_back(check_number_bound(m, state, kappa, row.c_eps_kappa));
  } catch (const EpsilonOutOfRange& e) {
    row.c_eps_kappa = nan;
    row.degraded = true;
    row.warnings.push_back(e.what());
    checks.push_back(skipped("number_bound", e.what()));
  }
  checks.push_back(check_number_sum(m, state));
  for (auto& c : check_overlap(m, v, c_eps)) checks.push_back(std::move(c));

  PullThroughResult pt = check_pull_through(m, state, kappa, params.checks.pullthrough_tol, params.solver, params.seed);
  row.pullthrough_resid = pt.max_relative();
  checks.push_back(pt.outcome);

  if (state.E0 < m.g().min_omega() && v[0] != 0.0) {
    AraiResult ar = check_arai_identities(m, state, kappa, params.solver);
    row.psi_tilde_norm = ar.psi_tilde_norm;
    for (auto& c : ar.outcomes) checks.push_back(std::move(c));
  } else {
    const std::string why = "E0 = " + fmt(state.E0) + " not below min omega = " + fmt(m.g().min_omega());
    checks.push_back(skipped("arai_energy", why));
    checks.push_back(skipped("arai_vector", why));
  }
  if (state_out) *state_out = state;
  return row;
}

bool SweepReport::degraded() const {
  for (const auto& r : rows)
    if (r.degraded) return true;
  return false;
}

bool SweepReport::all_checks_ok() const {
  if (degraded() || !all_ok(summary)) return false;
  for (const auto& r : rows)
    if (!all_ok(r.checks)) return false;
  return true;
}

std::vector<CheckOutcome> sweep_summary(const SweepReport& report) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : report.rows)
    if (r.error.empty() && r.kappa > 0.0) rows.push_back(&r);
  std::vector<CheckOutcome> out;

  auto tail_monotone = [&](const std::string& name, auto value, bool decreasing, std::vector<const SweepRow*> pool,
                           const std::string& what) {
    const std::size_t n = std::min<std::size_t>(5, pool.size());
    if (n < 2) return skipped(name, "fewer than two usable rows");
    CheckOutcome c;
    c.name = name;
    c.threshold = 0.0;
    c.slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = pool.size() - n; i < pool.size(); ++i) c.measured.push_back(value(*pool[i]));
    for (std::size_t i = 1; i < c.measured.size(); ++i) {
      const double step = decreasing ? c.measured[i - 1] - c.measured[i] : c.measured[i] - c.measured[i - 1];
      c.slack = std::min(c.slack, step);
    }
    c.status = c.slack > 0.0 ? CheckStatus::pass : CheckStatus::fail;
    c.context = what + " over the last " + std::to_string(n) + " rows (kappa descending)";
    return c;
  };

  out.push_back(tail_monotone("ratio_tail_decreasing", [](const SweepRow& r) { return r.e_over_kappa; }, true, rows,
                              "e(kappa)/kappa strictly decreasing"));

  if (rows.size() >= 2) {
    CheckOutcome c;
    c.name = "ratio_decay";
    c.threshold = 0.1;
    const double first = rows.front()->e_over_kappa;
    const double last = rows.back()->e_over_kappa;
    c.measured = {first, last, ratio(last, first)};
    c.slack = 0.1 - ratio(last, first);
    c.status = ratio(last, first) < 0.1 ? CheckStatus::pass : CheckStatus::fail;
    c.context = "final e/kappa below 10% of the first";
    out.push_back(c);
  } else {
    out.push_back(skipped("ratio_decay", "fewer than two usable rows"));
  }

  if (report.constants.lemma && !rows.empty()) {
    const double a = report.constants.lemma->a;
    double envelope = 0.0;
    for (const SweepRow* r : rows) envelope = std::max(envelope, ratio(r->e_abs, report.fit_coefficient * r->kappa * r->kappa));
    CheckOutcome c;
    c.name = "quadratic_fit";
    c.threshold = 3.0;
    const double q = ratio(report.fit_coefficient, a);
    c.measured = {report.fit_coefficient, a, q, envelope};
    c.slack = std::min(3.0 - q, q - 1.0 / 3.0);
    c.status = (q >= 1.0 / 3.0 && q <= 3.0) ? CheckStatus::pass : CheckStatus::fail;
    c.context = "least-squares C in e = C kappa^2 within a factor 3 of a; measured = (C, a, C/a, max e/(C kappa^2))";
    out.push_back(c);
  } else {
    out.push_back(skipped("quadratic_fit", "second-order constants unavailable"));
  }

  std::vector<const SweepRow*> arai;
  for (const SweepRow* r : rows)
    if (r->psi_tilde_norm > 0.0) arai.push_back(r);
  out.push_back(tail_monotone("psi_tilde_tail_decreasing", [](const SweepRow& r) { return r.psi_tilde_norm; }, true,
                              arai, "||Omega_kappa / (Omega0, Omega_kappa)|| decreasing toward 1"));
  out.push_back(tail_monotone("overlap_tail_increasing", [](const SweepRow& r) { return r.overlap; }, false, rows,
                              "|(Omega0, Omega_kappa)| increasing toward 1"));
  return out;
}

SweepReport sweep_kappa(const ModelParams& params, const std::vector<double>& kappas,
                        std::vector<FockVector>* vectors) {
  const Model m = build_model(params);
  SweepReport report;
  report.constants = theory_constants(m.g(), m.q(), m.b().n_max() >= 8 ? &m.b() : nullptr);
  std::vector<double> ks = kappas;
  std::stable_sort(ks.begin(), ks.end(), std::greater<double>());
  for (double kappa : ks) {
    try {
      SpectralResult state;
      report.rows.push_back(solve_row(m, params, report.constants, kappa, &state));
      if (vectors) vectors->push_back(std::move(state.ground_vector));
    } catch (const Error& e) {
      if (vectors) vectors->emplace_back();
      SweepRow row;
      row.kappa = kappa;
      row.degraded = true;
      row.error = e.what();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.E0 = row.residual = row.c1_kappa = row.e_abs = row.e_over_kappa = nan;
      row.rayleigh_bound = row.paper_bound = row.n_expect = row.c_eps_kappa = nan;
      row.overlap = row.pullthrough_resid = row.top_grade_weight = nan;
      report.rows.push_back(row);
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : report.rows) {
    if (!r.error.empty() || r.kappa <= 0.0) continue;
    num += r.e_abs * r.kappa * r.kappa;
    den += std::pow(r.kappa, 4);
  }
  report.fit_coefficient = den > 0.0 ? num / den : 0.0;
  report.summary = sweep_summary(report);
  return report;
}

}  // namespace phi4lab
