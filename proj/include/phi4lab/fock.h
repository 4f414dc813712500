#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "phi4lab/grid.h"

namespace phi4lab {

using Complex = std::complex<double>;
// Coefficients over the states of a FockBasis, in basis order.
using FockVector = Eigen::VectorXcd;
// A one-particle function sampled on the modes of a ModeGrid.
using ModeFunction = Eigen::VectorXcd;

/// Truncated symmetric Fock space over M modes: all occupations n with sum(n) <= N_max.
///
/// States are ordered by grade (total occupation) and lexicographically ascending
/// within a grade, so the vacuum is state 0. Ladder neighbours are tabulated at
/// construction, so applying a_i or a_i^dagger is a table lookup per state.
class FockBasis {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t default_max_dim = 2'000'000;
  // Tag written into serialized vectors; bumps if the ordering ever changes.
  static constexpr std::uint32_t order_tag = 1;

  FockBasis(std::size_t modes, int n_max, std::size_t max_dim = default_max_dim);

  // binomial(modes + n_max, modes), or npos on overflow.
  static std::size_t dimension_for(std::size_t modes, int n_max);

  std::size_t modes() const { return modes_; }
  int n_max() const { return n_max_; }
  std::size_t dim() const { return grade_.size(); }

  std::span<const std::uint16_t> occupation(std::size_t state) const {
    return {occupations_.data() + state * modes_, modes_};
  }
  int grade(std::size_t state) const { return grade_[state]; }
  // First state of grade g (g may be n_max + 1, giving dim()).
  std::size_t grade_begin(int g) const { return grade_offset_[static_cast<std::size_t>(g)]; }

  // Position of an occupation vector, npos if it is not in the truncated space.
  std::size_t index_of(std::span<const int> occupation) const;
  std::size_t lowered(std::size_t mode, std::size_t state) const { return lower_[mode * dim() + state]; }
  std::size_t raised(std::size_t mode, std::size_t state) const { return raise_[mode * dim() + state]; }

 private:
  std::size_t rank_within_grade(std::span<const int> occupation, int grade) const;
  std::size_t compositions(int total, std::size_t parts) const;

  std::size_t modes_;
  int n_max_;
  std::vector<std::uint16_t> occupations_;
  std::vector<int> grade_;
  std::vector<std::size_t> grade_offset_;
  std::vector<std::size_t> lower_;
  std::vector<std::size_t> raise_;
  std::vector<std::size_t> binom_;  // compositions table, (n_max + 1) x (modes + 1)
};

inline FockBasis enumerate_basis(std::size_t modes, int n_max,
                                 std::size_t max_dim = FockBasis::default_max_dim) {
  return FockBasis(modes, n_max, max_dim);
}

/// Matrix-free linear operator on FockVectors.
struct OperatorHandle {
  std::function<FockVector(const FockVector&)> apply;
  bool hermitian = true;
  std::string descriptor;
  std::size_t dim = 0;

  FockVector operator()(const FockVector& v) const { return apply(v); }
};

FockVector vacuum(const FockBasis& basis);
FockVector unit_vector(const FockBasis& basis, std::size_t state);

// Truncated creation P_N a_i^dagger. Weight that would leave the truncated space,
// sum over top-grade states of (n_i + 1)|c|^2, is added to *dropped_weight.
FockVector apply_mode_creation(const FockBasis& basis, std::size_t mode, const FockVector& v,
                               double* dropped_weight = nullptr);
FockVector apply_mode_annihilation(const FockBasis& basis, std::size_t mode, const FockVector& v);

enum class Smearing { create, annihilate, segal };

// a(f) = sum_i sqrt(w_i) conj(f_i) a_i, a^dagger(f) = sum_i sqrt(w_i) f_i a_i^dagger,
// segal = (a(f) + a^dagger(f)) / sqrt(2).
FockVector apply_smeared(const FockBasis& basis, const ModeGrid& grid, const ModeFunction& f,
                         const FockVector& v, Smearing which, double* dropped_weight = nullptr);

// Second quantization of a diagonal one-particle operator: multiplies each state by sum_i n_i x_i.
FockVector apply_dgamma(const FockBasis& basis, std::span<const double> one_particle,
                        const FockVector& v);
FockVector apply_dgamma_omega(const FockBasis& basis, const ModeGrid& grid, const FockVector& v);
FockVector apply_number(const FockBasis& basis, const FockVector& v);
// (H0 restricted to the vacuum complement)^-1; the vacuum component maps to 0.
FockVector apply_h0perp_inverse(const FockBasis& basis, const ModeGrid& grid, const FockVector& v);

enum class VacuumProjection { P0, P0perp };
FockVector project_vacuum(const FockBasis& basis, const FockVector& v, VacuumProjection which);

// Zeroes every component of grade > max_grade.
FockVector project_to_grades(const FockBasis& basis, const FockVector& v, int max_grade);
// sum of |c|^2 over states with grade > grade_floor.
double weight_above_grade(const FockBasis& basis, const FockVector& v, int grade_floor);
// Highest grade carrying a nonzero coefficient (-1 for the zero vector).
int max_grade(const FockBasis& basis, const FockVector& v);

OperatorHandle make_free_hamiltonian(const FockBasis& basis, const ModeGrid& grid);
OperatorHandle make_number_operator(const FockBasis& basis);
OperatorHandle make_vacuum_projection(const FockBasis& basis, VacuumProjection which);

// Serialized vector layout (binary, little-endian):
//   offset  size  field
//   0       8     magic "PHI4FOCK"
//   8       4     uint32 format version (1)
//   12      4     uint32 M (modes)
//   16      4     uint32 N_max
//   20      4     uint32 basis order tag (1 = graded, lexicographic ascending within grade)
//   24      8     uint64 dim
//   32      16*d  dim pairs of IEEE-754 float64 (real, imag) in basis order
// The text form is a header line
//   "# phi4lab-fock-vector v1 M=<M> N_max=<N> order=<tag> dim=<d>"
// followed by one "<real> <imag>" line per coefficient, 17 significant digits.
void write_fock_vector_binary(std::ostream& out, const FockBasis& basis, const FockVector& v);
FockVector read_fock_vector_binary(std::istream& in, const FockBasis& basis);
void write_fock_vector_text(std::ostream& out, const FockBasis& basis, const FockVector& v);
FockVector read_fock_vector_text(std::istream& in, const FockBasis& basis);

}  // namespace phi4lab
