#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mns/random.hpp"
#include "mns/tensor_algebra.hpp"

namespace mns {

/// Basis convention: qubit 0 is the leftmost tensor factor (most
/// significant bit of the computational index) and |0> is the +1
/// eigenvector of Z.
enum class Pauli { I, X, Y, Z };

ComplexMatrix pauli_matrix(Pauli p);

/// Single-qubit operator `p` acting on qubit `qubit` of an n-qubit register.
ComplexMatrix local_pauli(std::size_t n_qubits, std::size_t qubit, Pauli p);

/// Sum over qubits of the single-qubit operator `p` (S_x, S_y, S_z).
ComplexMatrix collective_pauli(std::size_t n_qubits, Pauli p);

struct LindbladTerm {
  double rate = 0.0;
  ComplexMatrix op;
  std::string label;
};

/// Generator rho' = sum_i rate_i D[V_i] rho, with
/// D[V] rho = V rho V^dagger - (V^dagger V rho + rho V^dagger V) / 2.
struct LindbladModel {
  std::size_t n_qubits = 0;
  std::vector<LindbladTerm> terms;

  std::size_t dim() const { return std::size_t{1} << n_qubits; }
  double max_rate() const;

  /// Throws InvalidParameter on a negative rate or mis-shaped operator.
  void validate() const;

  /// sum_i rate_i D[V_i] rho.
  ComplexMatrix dissipator(const ComplexMatrix& rho) const;
};

/// Operator-sum channel rho -> sum_k E_k rho E_k^dagger.
struct KrausChannel {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> operators;
  /// Time step of the Lindblad conversion; empty for exact channels.
  std::optional<double> dt;

  ComplexMatrix apply(const ComplexMatrix& rho) const;

  /// Frobenius norm of sum_k E_k^dagger E_k - I.
  double completeness_defect() const;

  static KrausChannel identity(std::size_t dim);
};

LindbladModel collective_xz(std::size_t n_qubits, double gamma_x, double gamma_z);

/// gamma_z D[S_z] plus delta * gamma_k D[Z_k] on every qubit k.
LindbladModel collective_z_with_local_dephasing(std::size_t n_qubits, double gamma_z, double delta,
                                                const std::vector<double>& local_rates);

/// gamma_1 D[V S_x V^dagger] + gamma_2 D[S_z]. `v_eps` must be unitary to 1e-10.
LindbladModel perturbed_collective(std::size_t n_qubits, double gamma_1, double gamma_2,
                                   const ComplexMatrix& v_eps);

enum class PerturbationMode { Global, LocalTensor };

/// Symmetry-breaking unitary with zero phase variables and angle vector of
/// Euclidean norm delta in a seeded random direction. In LocalTensor mode
/// every qubit gets its own 2x2 unitary with rotation angle +-delta, zero
/// diagonal phases and a uniformly random Givens phase (the rotation axis).
ComplexMatrix random_perturbation_unitary(std::size_t dim, double delta, PerturbationMode mode,
                                          std::uint64_t seed);

/// dt such that max_rate * dt = 1e-3 (1e-3 when the model is noiseless).
double default_time_step(const LindbladModel& model);

/// First-order operator-sum form of one step of length dt:
///   E_0 = I - (dt/2) sum_i gamma_i V_i^dagger V_i,  E_i = sqrt(gamma_i dt) V_i.
/// Zero-rate terms are dropped. The completeness defect is exactly
/// (dt^2/4) ||(sum_i gamma_i V_i^dagger V_i)^2||_F and is not renormalized away.
KrausChannel lindblad_to_kraus(const LindbladModel& model, double dt);

struct DfsCheck {
  bool is_dfs = false;
  /// max over sampled states and Kraus operators of ||[E_k, rho]||_F.
  double defect = 0.0;
};

inline constexpr double kDfsCommutatorTolerance = 1e-8;

/// Commutation test on random encoded states rho = U^dagger (rho_1 (x) I/N2 (+) 0) U.
DfsCheck dfs_check(const KrausChannel& channel, const ComplexMatrix& u, std::size_t n1,
                   std::size_t n2, std::size_t samples = 8, std::uint64_t seed = 0x5eed);

/// Random density matrix of the given dimension (Ginibre-induced, full rank).
ComplexMatrix random_density_matrix(std::size_t dim, Rng& rng);

/// Encoding matrix of the collective (S_x, S_z) noiseless subsystem for an odd
/// number of qubits: the multiplicity space of total spin 1/2 is H1 and the
/// spin-1/2 projection is the gauge factor H2 (N2 = 2). Returns U together
/// with N1; rows of U map original basis vectors to encoded coordinates.
struct KnownEncoding {
  ComplexMatrix u;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};
KnownEncoding collective_dfs_encoding(std::size_t n_qubits);

}  // namespace mns
