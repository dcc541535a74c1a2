#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mns/random.hpp"
#include "mns/tensor_algebra.hpp"

namespace mns {

/// Chart on U(N) with N(N+1)/2 phase variables and N(N-1)/2 angle variables.
///
/// The realized unitary is
///
///     U = D(phi_0 .. phi_{N-1}) * G_1 * G_2 * ... * G_m,     m = N(N-1)/2,
///
/// where the factors G_t run over the index pairs (i, j), i < j, in
/// lexicographic order, and G_t is the identity except for the block
///
///     [ cos t_ij              -e^{ i p_ij} sin t_ij ]
///     [ e^{-i p_ij} sin t_ij   cos t_ij             ]
///
/// on rows/columns (i, j). Acting on a vector the last pair is applied first.
///
/// Storage: phases = [phi_0 .. phi_{N-1}, p_(0,1), p_(0,2), ..., p_(N-2,N-1)],
///          angles = [t_(0,1), t_(0,2), ..., t_(N-2,N-1)].
struct UnitaryParams {
  std::size_t dim = 0;
  RealVector phases;
  RealVector angles;

  static UnitaryParams zeros(std::size_t dim);

  static constexpr std::size_t phase_count(std::size_t n) { return n * (n + 1) / 2; }
  static constexpr std::size_t angle_count(std::size_t n) { return n * (n - 1) / 2; }

  /// Total number of real parameters, N^2.
  std::size_t size() const { return dim * dim; }

  /// [phases; angles] as one vector of length N^2.
  RealVector flatten() const;
  static UnitaryParams from_flat(std::size_t dim, const RealVector& flat);

  /// Throws InvalidParameter if the vector lengths do not match dim.
  void validate() const;

  friend bool operator==(const UnitaryParams& a, const UnitaryParams& b) {
    return a.dim == b.dim && a.phases == b.phases && a.angles == b.angles;
  }
};

/// Index pairs (i, j), i < j, in factor order.
std::vector<std::pair<std::size_t, std::size_t>> givens_pairs(std::size_t dim);

ComplexMatrix realize(const UnitaryParams& params);

/// Inverse chart: parameters with realize(decompose(u)) == u up to rounding.
/// Angles land in [0, pi/2]. Throws InvalidParameter if u is not unitary
/// to 1e-10.
UnitaryParams decompose(const ComplexMatrix& u);

/// Angle vector uniformly distributed on the sphere of radius angle_norm,
/// phase vector likewise on the sphere of radius phase_norm. A zero norm
/// yields an exactly-zero vector.
UnitaryParams random_params(std::size_t dim, double angle_norm, double phase_norm, Rng& rng);
UnitaryParams random_params(std::size_t dim, double angle_norm, double phase_norm,
                            std::uint64_t seed);

/// Starting point for the encoding search: phases uniform in [0, 2 pi),
/// angles uniform in [0, pi).
UnitaryParams random_initial_params(std::size_t dim, Rng& rng);

namespace detail {

/// Block of a single chart factor. Entries are (ii, ij, ji, jj).
struct GivensBlock {
  Complex ii, ij, ji, jj;

  static GivensBlock make(double angle, double phase);
  /// Derivative of the block with respect to the angle.
  static GivensBlock d_angle(double angle, double phase);
  /// Derivative of the block with respect to the phase.
  static GivensBlock d_phase(double angle, double phase);
};

/// m <- m * G on columns (i, j).
void apply_right(ComplexMatrix& m, std::size_t i, std::size_t j, const GivensBlock& g);
/// m <- G^dagger * m on rows (i, j).
void apply_left_adjoint(ComplexMatrix& m, std::size_t i, std::size_t j, const GivensBlock& g);

}  // namespace detail

}  // namespace mns
