#include "mns/encoding_objective.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "mns/error.hpp"

namespace mns {

namespace {

constexpr double kChoiFloor = -1e-9;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

Dims Dims::make(std::size_t n1, std::size_t n2, std::size_t total) {
  if (n1 == 0 || n2 == 0 || n1 * n2 > total) {
    throw InvalidDimension("invalid decomposition (N1=" + std::to_string(n1) +
                           ", N2=" + std::to_string(n2) + ") for dimension " +
                           std::to_string(total) + ": need N1, N2 >= 1 and N1*N2 <= N");
  }
  return Dims{n1, n2, total - n1 * n2};
}

EncodingCandidate::EncodingCandidate(Dims dims, UnitaryParams params)
    : dims_(dims), params_(std::move(params)) {
  params_.validate();
  if (params_.dim != dims_.total()) {
    throw InvalidDimension("EncodingCandidate: parameter dimension " + std::to_string(params_.dim) +
                           " does not match N1*N2 + N3 = " + std::to_string(dims_.total()));
  }
  u_ = realize(params_);
}

ComplexMatrix ReducedChannel::apply(const ComplexMatrix& rho1) const {
  ComplexMatrix out = p1 * rho1;
  for (std::size_t k = 0; k < residual_ops.size(); ++k) {
    out += residual_signs[k] * (residual_ops[k] * rho1 * residual_ops[k].adjoint());
  }
  return out;
}

ComplexMatrix encode_operator(const ComplexMatrix& x, const ComplexMatrix& u, const Dims& dims) {
  const auto d2 = idx(dims.n2);
  const ComplexMatrix block =
      tensor(x, ComplexMatrix::Identity(d2, d2) / static_cast<double>(dims.n2));
  return u.adjoint() * direct_sum_embed(block, dims.total()) * u;
}

ComplexMatrix decode_operator(const ComplexMatrix& rho, const ComplexMatrix& u, const Dims& dims) {
  const auto d = idx(dims.block());
  const ComplexMatrix top = u.topRows(d);
  return partial_trace_2(top * rho * top.adjoint(), dims.n1, dims.n2);
}

std::vector<ComplexMatrix> transformed_kraus(const KrausChannel& channel, const ComplexMatrix& u) {
  std::vector<ComplexMatrix> out;
  out.reserve(channel.operators.size());
  for (const auto& e : channel.operators) out.push_back(u * e * u.adjoint());
  return out;
}

CoefficientTensor coefficients(const KrausChannel& channel, const EncodingCandidate& candidate) {
  const Dims& dims = candidate.dims();
  const PauliBasis b1 = pauli_basis(dims.n1);
  const PauliBasis b2 = pauli_basis(dims.n2);
  const auto d = idx(dims.block());
  const ComplexMatrix top = candidate.realized_u().topRows(d);

  CoefficientTensor a;
  a.reserve(channel.operators.size());
  for (const auto& e : channel.operators) {
    const ComplexMatrix block = top * e * top.adjoint();
    ComplexMatrix ak(idx(b1.size()), idx(b2.size()));
    for (std::size_t m = 0; m < b1.size(); ++m)
      for (std::size_t n = 0; n < b2.size(); ++n)
        ak(idx(m), idx(n)) = trace_product(block, tensor(b1[m], b2[n]));
    a.push_back(std::move(ak));
  }
  return a;
}

double objective(const KrausChannel& channel, const EncodingCandidate& candidate) {
  return EncodingObjective(channel, candidate.dims()).value(candidate.realized_u());
}

ComplexMatrix reduced_action(const KrausChannel& channel, const EncodingCandidate& candidate,
                             const ComplexMatrix& rho1) {
  const ComplexMatrix& u = candidate.realized_u();
  return decode_operator(channel.apply(encode_operator(rho1, u, candidate.dims())), u,
                         candidate.dims());
}

ReducedChannel reduced_channel(const KrausChannel& channel, const EncodingCandidate& candidate) {
  const std::size_t n1 = candidate.dims().n1;
  const auto d1 = idx(n1);
  ReducedChannel out;
  out.choi = ComplexMatrix::Zero(d1 * d1, d1 * d1);
  for (Eigen::Index i = 0; i < d1; ++i) {
    for (Eigen::Index j = 0; j < d1; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(d1, d1);
      unit(i, j) = 1.0;
      out.choi.block(i * d1, j * d1, d1, d1) = reduced_action(channel, candidate, unit);
    }
  }
  // Hermitize away roundoff before the eigensolver.
  out.choi = (0.5 * (out.choi + out.choi.adjoint())).eval();

  ComplexVector omega = ComplexVector::Zero(d1 * d1);
  for (Eigen::Index i = 0; i < d1; ++i) omega(i * d1 + i) = 1.0;
  out.p1 = (omega.adjoint() * out.choi * omega)(0, 0).real() / static_cast<double>(n1 * n1);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> full(out.choi, Eigen::EigenvaluesOnly);
  if (full.eigenvalues().minCoeff() < kChoiFloor) {
    throw NumericalConsistency("reduced_channel: Choi matrix of the reduced map has eigenvalue " +
                               std::to_string(full.eigenvalues().minCoeff()));
  }

  const ComplexMatrix residual = out.choi - out.p1 * omega * omega.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(residual);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double lambda = eig.eigenvalues()(k);
    if (std::abs(lambda) <= 1e-14 * scale) continue;
    if (lambda < kChoiFloor) out.residual_cp = false;
    const ComplexVector v = eig.eigenvectors().col(k);
    ComplexMatrix a(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index r = 0; r < d1; ++r) a(r, i) = v(i * d1 + r);
    out.residual_ops.push_back(std::sqrt(std::abs(lambda)) * a);
    out.residual_signs.push_back(lambda > 0.0 ? 1.0 : -1.0);
  }
  return out;
}

RealVector gradient(const KrausChannel& channel, const EncodingCandidate& candidate,
                    GradientMethod method, double step) {
  const EncodingObjective obj(channel, candidate.dims());
  switch (method) {
    case GradientMethod::Analytic: {
      RealVector g;
      obj.value_and_gradient(candidate.params(), g);
      return g;
    }
    case GradientMethod::ForwardDifference:
      return obj.finite_difference_gradient(candidate.params(), step, false);
    case GradientMethod::CentralDifference:
      break;
  }
  return obj.finite_difference_gradient(candidate.params(), step, true);
}

EncodingObjective::EncodingObjective(KrausChannel channel, Dims dims)
    : channel_(std::move(channel)), dims_(dims) {
  if (dims_.total() != channel_.dim) {
    throw InvalidDimension("EncodingObjective: decomposition dimension " +
                           std::to_string(dims_.total()) + " does not match channel dimension " +
                           std::to_string(channel_.dim));
  }
  const PauliBasis b1 = pauli_basis(dims_.n1);
  const PauliBasis b2 = pauli_basis(dims_.n2);
  identity_basis_.reserve(b2.size());
  for (std::size_t n = 0; n < b2.size(); ++n) identity_basis_.push_back(tensor(b1[0], b2[n]));
}

void EncodingObjective::identity_components(const ComplexMatrix& u,
                                            std::vector<ComplexVector>& c) const {
  const auto d = idx(dims_.block());
  const ComplexMatrix top = u.topRows(d);
  c.resize(channel_.operators.size());
  for (std::size_t k = 0; k < channel_.operators.size(); ++k) {
    const ComplexMatrix block = top * channel_.operators[k] * top.adjoint();
    c[k].resize(idx(identity_basis_.size()));
    for (std::size_t n = 0; n < identity_basis_.size(); ++n)
      c[k](idx(n)) = trace_product(block, identity_basis_[n]);
  }
}

double EncodingObjective::value(const ComplexMatrix& u) const {
  std::vector<ComplexVector> c;
  identity_components(u, c);
  double sum = 0.0;
  for (const auto& ck : c) sum += ck.squaredNorm();
  return sum / static_cast<double>(dims_.block());
}

double EncodingObjective::value(const UnitaryParams& params) const {
  return value(realize(params));
}

// With c_kn = Tr(U E_k U^dagger S_n), S_n the embedded s_0 (x) s_n, the
// Wirtinger derivative is
//   dJ/dU* = Gamma = 1/(N1 N2) sum_k (Q_k U E_k + Q_k^dagger U E_k^dagger),
//   Q_k = sum_n conj(c_kn) S_n,
// and dJ = 2 Re Tr(Gamma^dagger dU). For U = D G_1 ... G_m,
//   dU/d(phi_k) = i e_k e_k^T U                 -> dJ = -2 Im (U Gamma^dagger)_kk
//   dU/d(alpha in G_t) = L_t G_t' R_t           -> dJ = 2 Re Tr(X_t G_t')
// with X_t = R_t Gamma^dagger L_t, X_1 = G_1^dagger D^dagger U Gamma^dagger D,
// X_{t+1} = G_{t+1}^dagger X_t G_t.
double EncodingObjective::value_and_gradient(const UnitaryParams& params, RealVector& grad) const {
  params.validate();
  const std::size_t n = params.dim;
  const auto nn = idx(n);
  const auto d = idx(dims_.block());
  const double norm = 1.0 / static_cast<double>(dims_.block());

  const ComplexMatrix u = realize(params);
  std::vector<ComplexVector> c;
  identity_components(u, c);

  double value = 0.0;
  ComplexMatrix gamma_top = ComplexMatrix::Zero(d, nn);  // Gamma is zero below row d
  const ComplexMatrix top = u.topRows(d);
  for (std::size_t k = 0; k < channel_.operators.size(); ++k) {
    value += c[k].squaredNorm();
    ComplexMatrix q = ComplexMatrix::Zero(d, d);
    for (std::size_t m = 0; m < identity_basis_.size(); ++m)
      q += std::conj(c[k](idx(m))) * identity_basis_[m];
    const ComplexMatrix& e = channel_.operators[k];
    gamma_top.noalias() += q * (top * e) + q.adjoint() * (top * e.adjoint());
  }
  value *= norm;
  gamma_top *= norm;

  ComplexMatrix z = ComplexMatrix::Zero(nn, nn);
  z.leftCols(d).noalias() = u * gamma_top.adjoint();

  grad.resize(static_cast<Eigen::Index>(n * n));
  const auto n_phase = static_cast<Eigen::Index>(UnitaryParams::phase_count(n));
  for (Eigen::Index k = 0; k < nn; ++k) grad(k) = -2.0 * z(k, k).imag();

  ComplexMatrix x(nn, nn);
  for (Eigen::Index a = 0; a < nn; ++a) {
    const Complex da = std::polar(1.0, -params.phases(a));
    for (Eigen::Index b = 0; b < nn; ++b) x(a, b) = da * z(a, b) * std::polar(1.0, params.phases(b));
  }

  const auto pairs = givens_pairs(n);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto [i, j] = pairs[t];
    const auto ti = idx(t);
    const double angle = params.angles(ti);
    const double phase = params.phases(nn + ti);
    const auto g = detail::GivensBlock::make(angle, phase);
    detail::apply_left_adjoint(x, i, j, g);

    const auto ci = idx(i), cj = idx(j);
    const auto contract = [&](const detail::GivensBlock& dg) {
      return 2.0 * (x(ci, ci) * dg.ii + x(cj, ci) * dg.ij + x(ci, cj) * dg.ji + x(cj, cj) * dg.jj).real();
    };
    grad(nn + ti) = contract(detail::GivensBlock::d_phase(angle, phase));
    grad(n_phase + ti) = contract(detail::GivensBlock::d_angle(angle, phase));

    detail::apply_right(x, i, j, g);
  }
  return value;
}

RealVector EncodingObjective::finite_difference_gradient(const UnitaryParams& params, double step,
                                                         bool central) const {
  const RealVector x0 = params.flatten();
  const double f0 = central ? 0.0 : value(params);
  RealVector g(x0.size());
  RealVector x = x0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    x(i) = x0(i) + step;
    const double fp = value(UnitaryParams::from_flat(params.dim, x));
    if (central) {
      x(i) = x0(i) - step;
      const double fm = value(UnitaryParams::from_flat(params.dim, x));
      g(i) = (fp - fm) / (2.0 * step);
    } else {
      g(i) = (fp - f0) / step;
    }
    x(i) = x0(i);
  }
  return g;
}

}  // namespace mns
