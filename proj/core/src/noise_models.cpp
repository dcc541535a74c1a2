#include "mns/noise_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "mns/error.hpp"
#include "mns/unitary_parametrization.hpp"

namespace mns {

namespace {

void require_rate(double rate, const char* what) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw InvalidParameter(std::string(what) + ": rates must be finite and non-negative");
  }
}

void require_qubits(std::size_t n_qubits, const char* what) {
  if (n_qubits == 0 || n_qubits > 6) {
    throw InvalidParameter(std::string(what) + ": n_qubits must be in [1, 6]");
  }
}

}  // namespace

ComplexMatrix pauli_matrix(Pauli p) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (p) {
    case Pauli::I:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = Complex(0.0, -1.0);
      m(1, 0) = Complex(0.0, 1.0);
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

ComplexMatrix local_pauli(std::size_t n_qubits, std::size_t qubit, Pauli p) {
  if (qubit >= n_qubits) throw InvalidParameter("local_pauli: qubit index out of range");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    out = tensor(out, q == qubit ? pauli_matrix(p) : pauli_matrix(Pauli::I));
  }
  return out;
}

ComplexMatrix collective_pauli(std::size_t n_qubits, Pauli p) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (std::size_t q = 0; q < n_qubits; ++q) s += local_pauli(n_qubits, q, p);
  return s;
}

double LindbladModel::max_rate() const {
  double r = 0.0;
  for (const auto& t : terms) r = std::max(r, t.rate);
  return r;
}

void LindbladModel::validate() const {
  require_qubits(n_qubits, "LindbladModel");
  const auto n = static_cast<Eigen::Index>(dim());
  for (const auto& t : terms) {
    require_rate(t.rate, "LindbladModel");
    if (t.op.rows() != n || t.op.cols() != n) {
      throw InvalidParameter("LindbladModel: operator '" + t.label + "' has the wrong shape");
    }
  }
}

ComplexMatrix LindbladModel::dissipator(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& t : terms) {
    const ComplexMatrix vdv = t.op.adjoint() * t.op;
    out += t.rate * (t.op * rho * t.op.adjoint() - 0.5 * (vdv * rho + rho * vdv));
  }
  return out;
}

ComplexMatrix KrausChannel::apply(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& e : operators) out.noalias() += e * rho * e.adjoint();
  return out;
}

double KrausChannel::completeness_defect() const {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix sum = -ComplexMatrix::Identity(n, n);
  for (const auto& e : operators) sum.noalias() += e.adjoint() * e;
  return sum.norm();
}

KrausChannel KrausChannel::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return KrausChannel{dim, {ComplexMatrix::Identity(n, n)}, std::nullopt};
}

LindbladModel collective_xz(std::size_t n_qubits, double gamma_x, double gamma_z) {
  require_qubits(n_qubits, "collective_xz");
  require_rate(gamma_x, "collective_xz");
  require_rate(gamma_z, "collective_xz");
  LindbladModel m;
  m.n_qubits = n_qubits;
  m.terms.push_back({gamma_x, collective_pauli(n_qubits, Pauli::X), "S_x"});
  m.terms.push_back({gamma_z, collective_pauli(n_qubits, Pauli::Z), "S_z"});
  return m;
}

LindbladModel collective_z_with_local_dephasing(std::size_t n_qubits, double gamma_z, double delta,
                                                const std::vector<double>& local_rates) {
  require_qubits(n_qubits, "collective_z_with_local_dephasing");
  require_rate(gamma_z, "collective_z_with_local_dephasing");
  require_rate(delta, "collective_z_with_local_dephasing");
  if (local_rates.size() != n_qubits) {
    throw InvalidParameter("collective_z_with_local_dephasing: expected " +
                           std::to_string(n_qubits) + " local rates, got " +
                           std::to_string(local_rates.size()));
  }
  LindbladModel m;
  m.n_qubits = n_qubits;
  m.terms.push_back({gamma_z, collective_pauli(n_qubits, Pauli::Z), "S_z"});
  for (std::size_t q = 0; q < n_qubits; ++q) {
    require_rate(local_rates[q], "collective_z_with_local_dephasing");
    m.terms.push_back(
        {delta * local_rates[q], local_pauli(n_qubits, q, Pauli::Z), "Z_" + std::to_string(q + 1)});
  }
  return m;
}

LindbladModel perturbed_collective(std::size_t n_qubits, double gamma_1, double gamma_2,
                                   const ComplexMatrix& v_eps) {
  require_qubits(n_qubits, "perturbed_collective");
  require_rate(gamma_1, "perturbed_collective");
  require_rate(gamma_2, "perturbed_collective");
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  if (v_eps.rows() != n || v_eps.cols() != n || !is_unitary(v_eps, 1e-10)) {
    throw InvalidParameter("perturbed_collective: V_eps must be a unitary of dimension " +
                           std::to_string(n));
  }
  const ComplexMatrix sx = collective_pauli(n_qubits, Pauli::X);
  LindbladModel m;
  m.n_qubits = n_qubits;
  m.terms.push_back({gamma_1, v_eps * sx * v_eps.adjoint(), "V S_x V^dag"});
  m.terms.push_back({gamma_2, collective_pauli(n_qubits, Pauli::Z), "S_z"});
  return m;
}

ComplexMatrix random_perturbation_unitary(std::size_t dim, double delta, PerturbationMode mode,
                                          std::uint64_t seed) {
  if (!(delta >= 0.0)) throw InvalidParameter("random_perturbation_unitary: delta must be >= 0");
  Rng rng(seed);
  if (mode == PerturbationMode::Global) return realize(random_params(dim, delta, 0.0, rng));

  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw InvalidDimension("random_perturbation_unitary: local mode needs a power-of-two dimension");
  }
  ComplexMatrix v = ComplexMatrix::Identity(1, 1);
  for (std::size_t d = dim; d > 1; d >>= 1) {
    UnitaryParams p = random_params(2, delta, 0.0, rng);
    p.phases[2] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    v = tensor(v, realize(p));
  }
  return v;
}

double default_time_step(const LindbladModel& model) {
  const double r = model.max_rate();
  return r > 0.0 ? 1e-3 / r : 1e-3;
}

KrausChannel lindblad_to_kraus(const LindbladModel& model, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("lindblad_to_kraus: dt must be > 0");
  model.validate();
  const auto n = static_cast<Eigen::Index>(model.dim());
  KrausChannel ch;
  ch.dim = model.dim();
  ch.dt = dt;
  ComplexMatrix e0 = ComplexMatrix::Identity(n, n);
  std::vector<ComplexMatrix> jumps;
  for (const auto& t : model.terms) {
    if (t.rate == 0.0) continue;
    const ComplexMatrix v = std::sqrt(t.rate) * t.op;
    e0 -= 0.5 * dt * (v.adjoint() * v);
    jumps.push_back(std::sqrt(dt) * v);
  }
  ch.operators.push_back(std::move(e0));
  for (auto& j : jumps) ch.operators.push_back(std::move(j));
  return ch;
}

ComplexMatrix random_density_matrix(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

DfsCheck dfs_check(const KrausChannel& channel, const ComplexMatrix& u, std::size_t n1,
                   std::size_t n2, std::size_t samples, std::uint64_t seed) {
  if (n1 * n2 > channel.dim || static_cast<std::size_t>(u.rows()) != channel.dim) {
    throw InvalidDimension("dfs_check: encoded block does not fit the channel dimension");
  }
  Rng rng(seed);
  const auto d2 = static_cast<Eigen::Index>(n2);
  DfsCheck out;
  for (std::size_t s = 0; s < samples; ++s) {
    const ComplexMatrix rho1 = random_density_matrix(n1, rng);
    const ComplexMatrix block = tensor(rho1, ComplexMatrix::Identity(d2, d2) / static_cast<double>(n2));
    const ComplexMatrix rho = u.adjoint() * direct_sum_embed(block, channel.dim) * u;
    for (const auto& e : channel.operators) {
      out.defect = std::max(out.defect, (e * rho - rho * e).norm());
    }
  }
  out.is_dfs = out.defect <= kDfsCommutatorTolerance;
  return out;
}

KnownEncoding collective_dfs_encoding(std::size_t n_qubits) {
  require_qubits(n_qubits, "collective_dfs_encoding");
  if (n_qubits % 2 == 0 || n_qubits < 3) {
    throw InvalidParameter("collective_dfs_encoding: needs an odd number of qubits >= 3");
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  const auto n = static_cast<Eigen::Index>(dim);

  ComplexMatrix raise = ComplexMatrix::Zero(n, n);
  ComplexMatrix sigma_plus = ComplexMatrix::Zero(2, 2);
  sigma_plus(0, 1) = 1.0;
  for (std::size_t q = 0; q < n_qubits; ++q) {
    ComplexMatrix term = ComplexMatrix::Identity(1, 1);
    for (std::size_t k = 0; k < n_qubits; ++k) {
      term = tensor(term, k == q ? sigma_plus : ComplexMatrix::Identity(2, 2));
    }
    raise += term;
  }
  const ComplexMatrix lower = raise.adjoint();

  // Sector with S_z = +1 (total spin projection +1/2).
  std::vector<Eigen::Index> sector;
  const auto ones = static_cast<int>((n_qubits - 1) / 2);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (__builtin_popcountll(static_cast<unsigned long long>(x)) == ones) sector.push_back(x);
  }
  const auto ns = static_cast<Eigen::Index>(sector.size());
  ComplexMatrix embed = ComplexMatrix::Zero(n, ns);
  for (Eigen::Index s = 0; s < ns; ++s) embed(sector[static_cast<std::size_t>(s)], s) = 1.0;

  // Highest-weight vectors: kernel of J_+ on the sector.
  const ComplexMatrix restricted = raise * embed;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(restricted.adjoint() * restricted);
  std::vector<ComplexVector> highest;
  for (Eigen::Index k = 0; k < ns; ++k) {
    if (eig.eigenvalues()(k) < 1e-9) highest.push_back(embed * eig.eigenvectors().col(k));
  }
  const std::size_t n1 = highest.size();
  const std::size_t n2 = 2;

  ComplexMatrix basis = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < n1; ++a) {
    const auto col = static_cast<Eigen::Index>(a * n2);
    basis.col(col) = highest[a];
    basis.col(col + 1) = lower * highest[a];
  }
  const auto block = static_cast<Eigen::Index>(n1 * n2);
  const ComplexMatrix used = basis.leftCols(block);
  const ComplexMatrix complement = ComplexMatrix::Identity(n, n) - used * used.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ceig(complement);
  Eigen::Index next = block;
  for (Eigen::Index k = n - 1; k >= 0 && next < n; --k) {
    if (ceig.eigenvalues()(k) > 0.5) basis.col(next++) = ceig.eigenvectors().col(k);
  }
  if (next != n || unitarity_defect(basis) > 1e-10) {
    throw NumericalConsistency("collective_dfs_encoding: failed to build an orthonormal basis");
  }
  return KnownEncoding{basis.adjoint(), n1, n2};
}

}  // namespace mns
