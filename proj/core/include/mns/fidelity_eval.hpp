#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mns/encoding_objective.hpp"
#include "mns/mns_search.hpp"
#include "mns/noise_models.hpp"

namespace mns {

/// Liouvillian of a Lindblad model acting on column-stacked density matrices,
/// vec(A X B) = (B^T (x) A) vec(X):
///   L = sum_i g_i (conj(V_i) (x) V_i - (V_i^dag V_i)^T (x) I / 2 - I (x) V_i^dag V_i / 2).
ComplexMatrix liouvillian(const LindbladModel& model);

/// Channel exp(L t_f), acting on column-stacked density matrices.
struct EvolvedChannel {
  std::size_t dim = 0;
  double t_f = 0.0;
  ComplexMatrix superoperator;

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  /// sum_ij |i><j| (x) E(|i><j|).
  ComplexMatrix choi() const;
};

/// Exact integration of the master equation (scaling-and-squaring exponential).
EvolvedChannel evolve(const LindbladModel& model, double t_f);

/// U^dagger (rho_1 (x) I/N2 (+) 0) U. Throws InvalidState unless rho_1 is a
/// density matrix (Hermitian, unit trace, PSD; tolerance 1e-10).
ComplexMatrix encode(const ComplexMatrix& rho1, const ComplexMatrix& u, const Dims& dims);

struct DecodedState {
  /// Tr_2(P U rho U^dagger P), not renormalized.
  ComplexMatrix state;
  /// 1 - Tr(P U rho U^dagger P).
  double leakage = 0.0;

  ComplexMatrix normalized() const;
};

DecodedState decode(const ComplexMatrix& rho, const ComplexMatrix& u, const Dims& dims);

struct WorstCaseFidelity {
  double value = 1.0;
  /// Pure input attaining the minimum.
  ComplexVector state;
  std::size_t evaluations = 0;
};

/// Fidelity <psi| decode(E(encode(|psi><psi|))) |psi> of one pure input;
/// leakage counts as infidelity.
double state_fidelity(const ComplexMatrix& u, const Dims& dims, const EvolvedChannel& evolved,
                      const ComplexVector& psi);

/// Minimum of state_fidelity over pure inputs on H1: a coarse grid over a
/// hyperspherical chart (64 x 128 Bloch grid for a qubit, 8^4 for a qutrit)
/// followed by Nelder-Mead refinement of the best grid points.
WorstCaseFidelity worst_case_fidelity(const ComplexMatrix& u, const Dims& dims,
                                      const EvolvedChannel& evolved);

struct FidelityPoint {
  double param = 0.0;
  double fi_mns = 0.0;
  double fi_dfs = 0.0;
  double j_opt = 0.0;
  bool converged = false;
};

enum class SweepKind { Delta, Time };

struct SweepSpec {
  SweepKind kind = SweepKind::Delta;
  /// Values of delta (Delta sweeps) or of gamma * t_f (Time sweeps).
  std::vector<double> grid;
  /// gamma * t_f held fixed in Delta sweeps.
  double gamma_tf = 1.0;
  /// delta held fixed in Time sweeps.
  double delta = 0.0;
  /// gamma used to turn gamma * t_f into t_f.
  double gamma = 1.0;
};

/// Noise model as a function of the perturbation amplitude delta.
using ModelFamily = std::function<LindbladModel(double delta)>;

struct ReferenceEncoding {
  ComplexMatrix u;
  Dims dims;
};

/// For every grid point: search a fresh MNS for the model at that delta,
/// evolve to t_f, and compare worst-case fidelities of the MNS and the
/// reference (unperturbed DFS) encoding. Failures yield a row with
/// converged = false and NaN fidelities; the sweep never aborts. Rows come
/// out in ascending parameter order.
/// `kraus_dt` overrides default_time_step for the search objective.
std::vector<FidelityPoint> fidelity_sweep(const ModelFamily& family, const SearchConfig& search,
                                          const Dims& mns_dims, const ReferenceEncoding& dfs,
                                          const SweepSpec& spec,
                                          std::optional<double> kraus_dt = std::nullopt);

}  // namespace mns
