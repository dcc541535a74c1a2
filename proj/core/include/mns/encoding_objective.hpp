#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "mns/noise_models.hpp"
#include "mns/tensor_algebra.hpp"
#include "mns/unitary_parametrization.hpp"

namespace mns {

/// Decomposition H = H1 (x) H2 (+) H3 with N = n1*n2 + n3.
struct Dims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  /// Throws InvalidDimension unless n1, n2 >= 1 and n1*n2 <= total.
  static Dims make(std::size_t n1, std::size_t n2, std::size_t total);

  std::size_t block() const { return n1 * n2; }
  std::size_t total() const { return n1 * n2 + n3; }

  auto operator<=>(const Dims&) const = default;
};

/// One point of the search space. The realized unitary is computed once at
/// construction and never changes afterwards.
class EncodingCandidate {
 public:
  EncodingCandidate(Dims dims, UnitaryParams params);

  const Dims& dims() const { return dims_; }
  const UnitaryParams& params() const { return params_; }
  const ComplexMatrix& realized_u() const { return u_; }

 private:
  Dims dims_;
  UnitaryParams params_;
  ComplexMatrix u_;
};

/// E_1(rho_1) = p1 rho_1 + sum_k s_k A_k rho_1 A_k^dagger on H1.
///
/// The residual map E_1 - p1 id need not be completely positive (the
/// identity component can have coherences with other Pauli components), so
/// each residual operator carries a sign s_k = +-1; residual_cp reports
/// whether all signs are positive up to roundoff.
struct ReducedChannel {
  double p1 = 0.0;
  std::vector<ComplexMatrix> residual_ops;
  std::vector<double> residual_signs;
  bool residual_cp = true;
  /// Choi matrix sum_ij |i><j| (x) E_1(|i><j|).
  ComplexMatrix choi;

  ComplexMatrix apply(const ComplexMatrix& rho1) const;
};

/// Linear encoding X -> U^dagger (X (x) I/N2 (+) 0) U, defined for any
/// N1 x N1 operator (no density-matrix checks).
ComplexMatrix encode_operator(const ComplexMatrix& x, const ComplexMatrix& u, const Dims& dims);

/// Linear decoding rho -> Tr_2(P U rho U^dagger P).
ComplexMatrix decode_operator(const ComplexMatrix& rho, const ComplexMatrix& u, const Dims& dims);

/// {U E_k U^dagger}.
std::vector<ComplexMatrix> transformed_kraus(const KrausChannel& channel, const ComplexMatrix& u);

/// a[k](m, n) = Tr(P U E_k U^dagger P (s_m^(1) (x) s_n^(2))).
using CoefficientTensor = std::vector<ComplexMatrix>;
CoefficientTensor coefficients(const KrausChannel& channel, const EncodingCandidate& candidate);

/// J[U] = 1/(N1 N2) sum_k sum_n |Tr(P U E_k U^dagger P (s_0^(1) (x) s_n^(2)))|^2,
/// with n over all N2^2 elements of the H2 basis.
double objective(const KrausChannel& channel, const EncodingCandidate& candidate);

/// Reduced map on H1 computed by the encode -> channel -> decode pipeline.
/// p1 is the identity-component weight <Omega|C|Omega>/N1^2 of its Choi matrix.
/// Throws NumericalConsistency if the Choi matrix of E_1 itself has an
/// eigenvalue below -1e-9.
ReducedChannel reduced_channel(const KrausChannel& channel, const EncodingCandidate& candidate);

/// Direct action of the reduced map on one operator.
ComplexMatrix reduced_action(const KrausChannel& channel, const EncodingCandidate& candidate,
                             const ComplexMatrix& rho1);

enum class GradientMethod { CentralDifference, ForwardDifference, Analytic };

inline constexpr double kDefaultFiniteDifferenceStep = 1e-6;

/// dJ/d(params) in the flattened [phases; angles] order.
RealVector gradient(const KrausChannel& channel, const EncodingCandidate& candidate,
                    GradientMethod method = GradientMethod::CentralDifference,
                    double step = kDefaultFiniteDifferenceStep);

/// Objective bound to one channel and one decomposition, with the embedded
/// basis products s_0 (x) s_n precomputed. Const member functions are safe to
/// call concurrently.
class EncodingObjective {
 public:
  EncodingObjective(KrausChannel channel, Dims dims);

  const Dims& dims() const { return dims_; }
  const KrausChannel& channel() const { return channel_; }
  std::size_t parameter_count() const { return dims_.total() * dims_.total(); }

  double value(const ComplexMatrix& u) const;
  double value(const UnitaryParams& params) const;

  /// Value and analytic gradient with respect to the flattened parameters.
  double value_and_gradient(const UnitaryParams& params, RealVector& grad) const;

  RealVector finite_difference_gradient(const UnitaryParams& params, double step,
                                        bool central) const;

 private:
  void identity_components(const ComplexMatrix& u, std::vector<ComplexVector>& c) const;

  KrausChannel channel_;
  Dims dims_;
  std::vector<ComplexMatrix> identity_basis_;  // s_0^(1) (x) s_n^(2), block-sized
};

}  // namespace mns
