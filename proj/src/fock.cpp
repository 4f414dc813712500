#include "phi4lab/fock.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "phi4lab/errors.h"

namespace phi4lab {

namespace {

void check_size(const FockBasis& basis, const FockVector& v) {
  if (static_cast<std::size_t>(v.size()) != basis.dim())
    throw Error("vector length " + std::to_string(v.size()) + " does not match basis dimension " +
                std::to_string(basis.dim()));
}

void check_mode(const FockBasis& basis, std::size_t mode) {
  if (mode >= basis.modes())
    throw Error("mode index " + std::to_string(mode) + " out of range (M = " +
                std::to_string(basis.modes()) + ")");
}

// Appends all compositions of `total` into `parts` nonnegative parts, lexicographically ascending.
void append_compositions(int total, std::size_t parts, std::vector<int>& prefix,
                         std::vector<std::uint16_t>& out) {
  if (parts == 1) {
    for (int v : prefix) out.push_back(static_cast<std::uint16_t>(v));
    out.push_back(static_cast<std::uint16_t>(total));
    return;
  }
  for (int v = 0; v <= total; ++v) {
    prefix.push_back(v);
    append_compositions(total - v, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

void put_u32(std::ostream& out, std::uint32_t x) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((x >> (8 * i)) & 0xFFu);
  out.write(bytes, 4);
}

void put_u64(std::ostream& out, std::uint64_t x) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((x >> (8 * i)) & 0xFFu);
  out.write(bytes, 8);
}

std::uint64_t get_bytes(std::istream& in, int count) {
  unsigned char bytes[8] = {};
  if (!in.read(reinterpret_cast<char*>(bytes), count)) throw FormatError("truncated fock vector file");
  std::uint64_t x = 0;
  for (int i = count - 1; i >= 0; --i) x = (x << 8) | bytes[i];
  return x;
}

void check_header(const FockBasis& basis, std::uint64_t modes, std::uint64_t n_max,
                  std::uint64_t order, std::uint64_t dim) {
  if (modes != basis.modes() || n_max != static_cast<std::uint64_t>(basis.n_max()) ||
      order != FockBasis::order_tag || dim != basis.dim())
    throw FormatError("fock vector header (M=" + std::to_string(modes) + ", N_max=" +
                      std::to_string(n_max) + ", order=" + std::to_string(order) +
                      ", dim=" + std::to_string(dim) + ") does not match the basis");
}

}  // namespace

std::size_t FockBasis::dimension_for(std::size_t modes, int n_max) {
  // binomial(modes + n_max, n_max), computed exactly while it fits.
  unsigned __int128 c = 1;
  const auto n = static_cast<unsigned __int128>(modes) + static_cast<unsigned>(n_max);
  const auto k = static_cast<unsigned>(std::min<std::size_t>(modes, static_cast<std::size_t>(n_max)));
  for (unsigned i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > static_cast<unsigned __int128>(npos - 1)) return npos;
  }
  return static_cast<std::size_t>(c);
}

FockBasis::FockBasis(std::size_t modes, int n_max, std::size_t max_dim) : modes_(modes), n_max_(n_max) {
  if (modes == 0) throw ConfigError("grid.modes", "need at least one mode");
  if (n_max < 0 || n_max > 65535) throw ConfigError("truncation.n_max", "must be in [0, 65535]");
  const std::size_t dimension = dimension_for(modes, n_max);
  if (dimension == npos || dimension > max_dim) throw BasisTooLarge(dimension, max_dim);

  const std::size_t cols = modes + 1;
  binom_.assign(static_cast<std::size_t>(n_max + 1) * cols, 0);
  for (int t = 0; t <= n_max; ++t) {
    for (std::size_t p = 1; p <= modes; ++p) {
      // compositions(t, p) = sum_{v=0..t} compositions(t - v, p - 1)
      std::size_t value = 0;
      if (p == 1) {
        value = 1;
      } else {
        for (int v = 0; v <= t; ++v) value += binom_[static_cast<std::size_t>(t - v) * cols + p - 1];
      }
      binom_[static_cast<std::size_t>(t) * cols + p] = value;
    }
  }

  occupations_.reserve(dimension * modes);
  grade_offset_.assign(static_cast<std::size_t>(n_max + 2), 0);
  std::vector<int> prefix;
  for (int g = 0; g <= n_max; ++g) {
    grade_offset_[static_cast<std::size_t>(g)] = occupations_.size() / modes;
    append_compositions(g, modes, prefix, occupations_);
  }
  grade_offset_[static_cast<std::size_t>(n_max + 1)] = occupations_.size() / modes;
  grade_.resize(occupations_.size() / modes);
  for (int g = 0; g <= n_max; ++g)
    for (std::size_t s = grade_begin(g); s < grade_begin(g + 1); ++s) grade_[s] = g;

  const std::size_t d = dim();
  lower_.assign(modes * d, npos);
  raise_.assign(modes * d, npos);
  std::vector<int> occ(modes);
  for (std::size_t s = 0; s < d; ++s) {
    auto n = occupation(s);
    std::copy(n.begin(), n.end(), occ.begin());
    for (std::size_t i = 0; i < modes; ++i) {
      if (occ[i] == 0) continue;
      --occ[i];
      const std::size_t t = grade_begin(grade_[s] - 1) + rank_within_grade(occ, grade_[s] - 1);
      ++occ[i];
      lower_[i * d + s] = t;
      raise_[i * d + t] = s;
    }
  }
}

std::size_t FockBasis::compositions(int total, std::size_t parts) const {
  return binom_[static_cast<std::size_t>(total) * (modes_ + 1) + parts];
}

std::size_t FockBasis::rank_within_grade(std::span<const int> occupation, int grade) const {
  std::size_t rank = 0;
  int remaining = grade;
  for (std::size_t p = 0; p + 1 < modes_; ++p) {
    for (int v = 0; v < occupation[p]; ++v) rank += compositions(remaining - v, modes_ - p - 1);
    remaining -= occupation[p];
  }
  return rank;
}

std::size_t FockBasis::index_of(std::span<const int> occupation) const {
  if (occupation.size() != modes_) return npos;
  int g = 0;
  for (int n : occupation) {
    if (n < 0) return npos;
    g += n;
  }
  if (g > n_max_) return npos;
  return grade_begin(g) + rank_within_grade(occupation, g);
}

FockVector vacuum(const FockBasis& basis) { return unit_vector(basis, 0); }

FockVector unit_vector(const FockBasis& basis, std::size_t state) {
  FockVector v = FockVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  v[static_cast<Eigen::Index>(state)] = 1.0;
  return v;
}

FockVector apply_mode_creation(const FockBasis& basis, std::size_t mode, const FockVector& v,
                               double* dropped_weight) {
  check_size(basis, v);
  check_mode(basis, mode);
  FockVector out = FockVector::Zero(v.size());
  double dropped = 0.0;
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const Complex c = v[static_cast<Eigen::Index>(s)];
    if (c == 0.0) continue;
    const double n1 = basis.occupation(s)[mode] + 1.0;
    const std::size_t t = basis.raised(mode, s);
    if (t == FockBasis::npos)
      dropped += n1 * std::norm(c);
    else
      out[static_cast<Eigen::Index>(t)] += std::sqrt(n1) * c;
  }
  if (dropped_weight) *dropped_weight += dropped;
  return out;
}

FockVector apply_mode_annihilation(const FockBasis& basis, std::size_t mode, const FockVector& v) {
  check_size(basis, v);
  check_mode(basis, mode);
  FockVector out = FockVector::Zero(v.size());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const std::size_t t = basis.lowered(mode, s);
    if (t == FockBasis::npos) continue;
    out[static_cast<Eigen::Index>(t)] += std::sqrt(static_cast<double>(basis.occupation(s)[mode])) *
                                         v[static_cast<Eigen::Index>(s)];
  }
  return out;
}

FockVector apply_smeared(const FockBasis& basis, const ModeGrid& grid, const ModeFunction& f,
                         const FockVector& v, Smearing which, double* dropped_weight) {
  check_size(basis, v);
  if (static_cast<std::size_t>(f.size()) != basis.modes() || grid.size() != basis.modes())
    throw Error("mode function, grid and basis disagree on the number of modes");
  const bool create = which != Smearing::annihilate;
  const bool annihilate = which != Smearing::create;
  const double norm = which == Smearing::segal ? 1.0 / std::sqrt(2.0) : 1.0;

  std::vector<Complex> up(basis.modes());
  std::vector<Complex> down(basis.modes());
  for (std::size_t i = 0; i < basis.modes(); ++i) {
    const double sw = std::sqrt(grid.weights()[i]) * norm;
    up[i] = sw * f[static_cast<Eigen::Index>(i)];
    down[i] = sw * std::conj(f[static_cast<Eigen::Index>(i)]);
  }

  FockVector out = FockVector::Zero(v.size());
  double dropped = 0.0;
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const Complex c = v[static_cast<Eigen::Index>(s)];
    if (c == 0.0) continue;
    const auto n = basis.occupation(s);
    for (std::size_t i = 0; i < basis.modes(); ++i) {
      if (annihilate && n[i] > 0) {
        const std::size_t t = basis.lowered(i, s);
        out[static_cast<Eigen::Index>(t)] += down[i] * std::sqrt(static_cast<double>(n[i])) * c;
      }
      if (create) {
        const double n1 = n[i] + 1.0;
        const std::size_t t = basis.raised(i, s);
        if (t == FockBasis::npos)
          dropped += std::norm(up[i] * c) * n1;
        else
          out[static_cast<Eigen::Index>(t)] += up[i] * std::sqrt(n1) * c;
      }
    }
  }
  if (dropped_weight) *dropped_weight += dropped;
  return out;
}

FockVector apply_dgamma(const FockBasis& basis, std::span<const double> one_particle,
                        const FockVector& v) {
  check_size(basis, v);
  if (one_particle.size() != basis.modes()) throw Error("one-particle operator has wrong length");
  FockVector out(v.size());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto n = basis.occupation(s);
    double e = 0.0;
    for (std::size_t i = 0; i < basis.modes(); ++i) e += n[i] * one_particle[i];
    out[static_cast<Eigen::Index>(s)] = e * v[static_cast<Eigen::Index>(s)];
  }
  return out;
}

FockVector apply_dgamma_omega(const FockBasis& basis, const ModeGrid& grid, const FockVector& v) {
  return apply_dgamma(basis, grid.omega(), v);
}

FockVector apply_number(const FockBasis& basis, const FockVector& v) {
  check_size(basis, v);
  FockVector out(v.size());
  for (std::size_t s = 0; s < basis.dim(); ++s)
    out[static_cast<Eigen::Index>(s)] = static_cast<double>(basis.grade(s)) * v[static_cast<Eigen::Index>(s)];
  return out;
}

FockVector apply_h0perp_inverse(const FockBasis& basis, const ModeGrid& grid, const FockVector& v) {
  check_size(basis, v);
  FockVector out(v.size());
  out[0] = 0.0;
  for (std::size_t s = 1; s < basis.dim(); ++s) {
    const auto n = basis.occupation(s);
    double e = 0.0;
    for (std::size_t i = 0; i < basis.modes(); ++i) e += n[i] * grid.omega()[i];
    out[static_cast<Eigen::Index>(s)] = v[static_cast<Eigen::Index>(s)] / e;
  }
  return out;
}

FockVector project_vacuum(const FockBasis& basis, const FockVector& v, VacuumProjection which) {
  check_size(basis, v);
  if (which == VacuumProjection::P0perp) {
    FockVector out = v;
    out[0] = 0.0;
    return out;
  }
  FockVector out = FockVector::Zero(v.size());
  out[0] = v[0];
  return out;
}

FockVector project_to_grades(const FockBasis& basis, const FockVector& v, int max_grade_kept) {
  check_size(basis, v);
  FockVector out = v;
  const int g = std::max(max_grade_kept + 1, 0);
  if (g <= basis.n_max()) out.tail(static_cast<Eigen::Index>(basis.dim() - basis.grade_begin(g))).setZero();
  return out;
}

double weight_above_grade(const FockBasis& basis, const FockVector& v, int grade_floor) {
  check_size(basis, v);
  const int g = std::max(grade_floor + 1, 0);
  if (g > basis.n_max()) return 0.0;
  return v.tail(static_cast<Eigen::Index>(basis.dim() - basis.grade_begin(g))).squaredNorm();
}

int max_grade(const FockBasis& basis, const FockVector& v) {
  check_size(basis, v);
  for (std::size_t s = basis.dim(); s-- > 0;)
    if (v[static_cast<Eigen::Index>(s)] != 0.0) return basis.grade(s);
  return -1;
}

OperatorHandle make_free_hamiltonian(const FockBasis& basis, const ModeGrid& grid) {
  return {[&basis, &grid](const FockVector& v) { return apply_dgamma_omega(basis, grid, v); }, true,
          "H0 = dGamma(omega)", basis.dim()};
}

OperatorHandle make_number_operator(const FockBasis& basis) {
  return {[&basis](const FockVector& v) { return apply_number(basis, v); }, true, "N_b = dGamma(1)",
          basis.dim()};
}

OperatorHandle make_vacuum_projection(const FockBasis& basis, VacuumProjection which) {
  return {[&basis, which](const FockVector& v) { return project_vacuum(basis, v, which); }, true,
          which == VacuumProjection::P0 ? "P0" : "P0perp", basis.dim()};
}

void write_fock_vector_binary(std::ostream& out, const FockBasis& basis, const FockVector& v) {
  check_size(basis, v);
  out.write("PHI4FOCK", 8);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(basis.modes()));
  put_u32(out, static_cast<std::uint32_t>(basis.n_max()));
  put_u32(out, FockBasis::order_tag);
  put_u64(out, basis.dim());
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    put_u64(out, std::bit_cast<std::uint64_t>(v[s].real()));
    put_u64(out, std::bit_cast<std::uint64_t>(v[s].imag()));
  }
  if (!out) throw FormatError("failed writing fock vector");
}

FockVector read_fock_vector_binary(std::istream& in, const FockBasis& basis) {
  char magic[8];
  if (!in.read(magic, 8) || std::string(magic, 8) != "PHI4FOCK")
    throw FormatError("not a phi4lab binary fock vector");
  if (get_bytes(in, 4) != 1) throw FormatError("unsupported fock vector format version");
  const auto modes = get_bytes(in, 4);
  const auto n_max = get_bytes(in, 4);
  const auto order = get_bytes(in, 4);
  const auto dim = get_bytes(in, 8);
  check_header(basis, modes, n_max, order, dim);
  FockVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    const double re = std::bit_cast<double>(get_bytes(in, 8));
    const double im = std::bit_cast<double>(get_bytes(in, 8));
    v[s] = Complex(re, im);
  }
  return v;
}

void write_fock_vector_text(std::ostream& out, const FockBasis& basis, const FockVector& v) {
  check_size(basis, v);
  out << "# phi4lab-fock-vector v1 M=" << basis.modes() << " N_max=" << basis.n_max()
      << " order=" << FockBasis::order_tag << " dim=" << basis.dim() << '\n';
  char buf[64];
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v[s].real(), v[s].imag());
    out << buf;
  }
  if (!out) throw FormatError("failed writing fock vector");
}

FockVector read_fock_vector_text(std::istream& in, const FockBasis& basis) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("empty fock vector file");
  unsigned long long modes = 0, n_max = 0, order = 0, dim = 0;
  if (std::sscanf(header.c_str(), "# phi4lab-fock-vector v1 M=%llu N_max=%llu order=%llu dim=%llu",
                  &modes, &n_max, &order, &dim) != 4)
    throw FormatError("malformed fock vector header: " + header);
  check_header(basis, modes, n_max, order, dim);
  FockVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw FormatError("fock vector file ends after " + std::to_string(s) + " entries");
    v[s] = Complex(re, im);
  }
  return v;
}

}  // namespace phi4lab
