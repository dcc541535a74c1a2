#include "mns/fidelity_eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "mns/error.hpp"
#include "mns/nelder_mead.hpp"

namespace mns {

namespace {

constexpr double kStateTolerance = 1e-10;
constexpr std::size_t kRefinedGridPoints = 3;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

ComplexVector vec(const ComplexMatrix& m) { return m.reshaped(); }

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) { return v.reshaped(n, n); }

// Pure state on C^n from 2(n-1) chart coordinates: hyperspherical amplitude
// angles followed by relative phases of components 1..n-1.
ComplexVector chart_state(const RealVector& x, std::size_t n) {
  ComplexVector psi(idx(n));
  const auto m = idx(n - 1);
  double radius = 1.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double amp = radius * std::cos(x(k));
    psi(k) = k == 0 ? Complex(amp) : std::polar(amp, x(m + k - 1));
    radius *= std::sin(x(k));
  }
  psi(m) = m == 0 ? Complex(radius) : std::polar(radius, x(2 * m - 1));
  return psi;
}

}  // namespace

ComplexMatrix liouvillian(const LindbladModel& model) {
  model.validate();
  const auto n = idx(model.dim());
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix l = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& t : model.terms) {
    if (t.rate == 0.0) continue;
    const ComplexMatrix vdv = t.op.adjoint() * t.op;
    l += t.rate * (tensor(t.op.conjugate(), t.op) - 0.5 * tensor(vdv.transpose(), id) -
                   0.5 * tensor(id, vdv));
  }
  return l;
}

ComplexMatrix EvolvedChannel::apply(const ComplexMatrix& rho) const {
  return unvec(superoperator * vec(rho), idx(dim));
}

ComplexMatrix EvolvedChannel::choi() const {
  const auto n = idx(dim);
  ComplexMatrix c(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      c.block(i * n, j * n, n, n) = unvec(superoperator.col(i + j * n), n);
  return c;
}

EvolvedChannel evolve(const LindbladModel& model, double t_f) {
  if (!(t_f >= 0.0) || !std::isfinite(t_f)) throw InvalidParameter("evolve: t_f must be >= 0");
  EvolvedChannel ch;
  ch.dim = model.dim();
  ch.t_f = t_f;
  const ComplexMatrix generator = liouvillian(model) * t_f;
  ch.superoperator = generator.exp();
  return ch;
}

ComplexMatrix encode(const ComplexMatrix& rho1, const ComplexMatrix& u, const Dims& dims) {
  const auto n1 = idx(dims.n1);
  if (rho1.rows() != n1 || rho1.cols() != n1) {
    throw InvalidState("encode: expected a " + std::to_string(dims.n1) + "x" +
                       std::to_string(dims.n1) + " density matrix");
  }
  if (!is_hermitian(rho1, kStateTolerance)) throw InvalidState("encode: input is not Hermitian");
  if (std::abs(rho1.trace() - Complex(1.0)) > kStateTolerance) {
    throw InvalidState("encode: input does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho1, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kStateTolerance) {
    throw InvalidState("encode: input is not positive semidefinite");
  }
  return encode_operator(rho1, u, dims);
}

ComplexMatrix DecodedState::normalized() const {
  const double tr = state.trace().real();
  return tr > 0.0 && tr < 1.0 ? ComplexMatrix(state / tr) : state;
}

DecodedState decode(const ComplexMatrix& rho, const ComplexMatrix& u, const Dims& dims) {
  DecodedState out;
  out.state = decode_operator(rho, u, dims);
  out.leakage = 1.0 - out.state.trace().real();
  return out;
}

double state_fidelity(const ComplexMatrix& u, const Dims& dims, const EvolvedChannel& evolved,
                      const ComplexVector& psi) {
  const ComplexMatrix rho = psi * psi.adjoint();
  const DecodedState out = decode(evolved.apply(encode(rho, u, dims)), u, dims);
  return (psi.adjoint() * out.state * psi)(0, 0).real();
}

WorstCaseFidelity worst_case_fidelity(const ComplexMatrix& u, const Dims& dims,
                                      const EvolvedChannel& evolved) {
  const std::size_t n1 = dims.n1;
  const auto d1 = idx(n1);

  // Transfer matrix of decode . evolve . encode on column-stacked operators.
  ComplexMatrix transfer(d1 * d1, d1 * d1);
  for (Eigen::Index i = 0; i < d1; ++i) {
    for (Eigen::Index j = 0; j < d1; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(d1, d1);
      unit(i, j) = 1.0;
      transfer.col(i + j * d1) =
          vec(decode_operator(evolved.apply(encode_operator(unit, u, dims)), u, dims));
    }
  }

  WorstCaseFidelity out;
  const auto f_state = [&](const ComplexVector& psi) {
    const ComplexVector r = vec(psi * psi.adjoint());
    return (r.adjoint() * transfer * r)(0, 0).real();
  };

  if (n1 == 1) {
    out.state = ComplexVector::Ones(1);
    out.value = f_state(out.state);
    out.evaluations = 1;
    return out;
  }

  const std::size_t m = n1 - 1;
  const std::size_t chart_dim = 2 * m;
  std::size_t amp_points = 0, phase_points = 0;
  if (n1 == 2) {
    amp_points = 64;
    phase_points = 128;
  } else if (n1 == 3) {
    amp_points = phase_points = 8;
  } else {
    const auto per_axis = static_cast<std::size_t>(std::floor(std::pow(4096.0, 1.0 / chart_dim)));
    amp_points = phase_points = std::max<std::size_t>(3, per_axis);
  }
  const double amp_step = (std::numbers::pi / 2.0) / static_cast<double>(amp_points - 1);
  const double phase_step = 2.0 * std::numbers::pi / static_cast<double>(phase_points);

  std::size_t total = 1;
  for (std::size_t k = 0; k < m; ++k) total *= amp_points * phase_points;

  const auto f_chart = [&](const RealVector& x) { return f_state(chart_state(x, n1)); };

  std::vector<std::pair<double, RealVector>> best;
  RealVector x(idx(chart_dim));
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t rem = g;
    for (std::size_t k = 0; k < m; ++k) {
      x(idx(k)) = amp_step * static_cast<double>(rem % amp_points);
      rem /= amp_points;
    }
    for (std::size_t k = 0; k < m; ++k) {
      x(idx(m + k)) = phase_step * static_cast<double>(rem % phase_points);
      rem /= phase_points;
    }
    const double v = f_chart(x);
    if (best.size() < kRefinedGridPoints || v < best.back().first) {
      best.emplace_back(v, x);
      std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (best.size() > kRefinedGridPoints) best.pop_back();
    }
  }
  out.evaluations = total;
  out.value = best.front().first;
  out.state = chart_state(best.front().second, n1);

  for (const auto& [v0, x0] : best) {
    const NelderMeadResult r = nelder_mead(f_chart, x0, 0.5 * amp_step);
    out.evaluations += r.evaluations;
    if (r.value < out.value) {
      out.value = r.value;
      out.state = chart_state(r.x, n1);
    }
  }
  return out;
}

std::vector<FidelityPoint> fidelity_sweep(const ModelFamily& family, const SearchConfig& search,
                                          const Dims& mns_dims, const ReferenceEncoding& dfs,
                                          const SweepSpec& spec, std::optional<double> kraus_dt) {
  if (spec.grid.empty()) throw InvalidParameter("fidelity_sweep: empty grid");
  if (!(spec.gamma > 0.0)) throw InvalidParameter("fidelity_sweep: gamma must be positive");
  if (dfs.dims.n1 != mns_dims.n1) {
    throw InvalidDimension("fidelity_sweep: reference and MNS encodings must encode the same H1");
  }

  struct Found {
    double delta;
    UnitaryParams params;
    double j;
    bool converged;
  };
  std::optional<Found> cached;
  const auto search_at = [&](double delta) -> const Found& {
    if (!cached || cached->delta != delta) {
      const LindbladModel model = family(delta);
      const double dt = kraus_dt.value_or(default_time_step(model));
      const SearchResult r = search_dims(lindblad_to_kraus(model, dt), mns_dims, search);
      if (!std::isfinite(r.best_j)) throw NumericalConsistency("every restart failed");
      cached = Found{delta, r.best_params, r.best_j, r.per_restart[r.best_restart].converged};
    }
    return *cached;
  };

  std::vector<double> grid = spec.grid;
  std::stable_sort(grid.begin(), grid.end());
  std::vector<FidelityPoint> out;
  out.reserve(grid.size());
  for (double value : grid) {
    FidelityPoint pt;
    pt.param = value;
    try {
      const double delta = spec.kind == SweepKind::Delta ? value : spec.delta;
      const double gamma_tf = spec.kind == SweepKind::Delta ? spec.gamma_tf : value;
      const Found& found = search_at(delta);
      const EvolvedChannel evolved = evolve(family(delta), gamma_tf / spec.gamma);
      pt.fi_mns = worst_case_fidelity(realize(found.params), mns_dims, evolved).value;
      pt.fi_dfs = worst_case_fidelity(dfs.u, dfs.dims, evolved).value;
      pt.j_opt = found.j;
      pt.converged = found.converged;
    } catch (const std::exception&) {
      pt.fi_mns = pt.fi_dfs = pt.j_opt = std::numeric_limits<double>::quiet_NaN();
      pt.converged = false;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace mns
