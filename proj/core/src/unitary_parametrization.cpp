#include "mns/unitary_parametrization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mns/error.hpp"

namespace mns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RealVector sphere_sample(Eigen::Index n, double radius, Rng& rng) {
  RealVector v = RealVector::Zero(n);
  if (radius == 0.0 || n == 0) return v;
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    norm = v.norm();
  }
  return v * (radius / norm);
}

}  // namespace

UnitaryParams UnitaryParams::zeros(std::size_t dim) {
  UnitaryParams p;
  p.dim = dim;
  p.phases = RealVector::Zero(static_cast<Eigen::Index>(phase_count(dim)));
  p.angles = RealVector::Zero(static_cast<Eigen::Index>(angle_count(dim)));
  return p;
}

RealVector UnitaryParams::flatten() const {
  RealVector flat(phases.size() + angles.size());
  flat << phases, angles;
  return flat;
}

UnitaryParams UnitaryParams::from_flat(std::size_t dim, const RealVector& flat) {
  if (static_cast<std::size_t>(flat.size()) != dim * dim) {
    throw InvalidParameter("UnitaryParams::from_flat: expected " + std::to_string(dim * dim) +
                           " values, got " + std::to_string(flat.size()));
  }
  const auto np = static_cast<Eigen::Index>(phase_count(dim));
  const auto na = static_cast<Eigen::Index>(angle_count(dim));
  UnitaryParams p;
  p.dim = dim;
  p.phases = flat.head(np);
  p.angles = flat.tail(na);
  return p;
}

void UnitaryParams::validate() const {
  if (dim == 0) throw InvalidParameter("UnitaryParams: dimension must be at least 1");
  if (static_cast<std::size_t>(phases.size()) != phase_count(dim) ||
      static_cast<std::size_t>(angles.size()) != angle_count(dim)) {
    throw InvalidParameter("UnitaryParams: dimension " + std::to_string(dim) + " needs " +
                           std::to_string(phase_count(dim)) + " phases and " +
                           std::to_string(angle_count(dim)) + " angles, got " +
                           std::to_string(phases.size()) + " and " + std::to_string(angles.size()));
  }
}

std::vector<std::pair<std::size_t, std::size_t>> givens_pairs(std::size_t dim) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(UnitaryParams::angle_count(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) pairs.emplace_back(i, j);
  return pairs;
}

namespace detail {

GivensBlock GivensBlock::make(double angle, double phase) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Complex e = std::polar(1.0, phase);
  return {c, -e * s, std::conj(e) * s, c};
}

GivensBlock GivensBlock::d_angle(double angle, double phase) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Complex e = std::polar(1.0, phase);
  return {-s, -e * c, std::conj(e) * c, -s};
}

GivensBlock GivensBlock::d_phase(double angle, double phase) {
  const double s = std::sin(angle);
  const Complex e = std::polar(1.0, phase);
  const Complex i(0.0, 1.0);
  return {0.0, -i * e * s, -i * std::conj(e) * s, 0.0};
}

void apply_right(ComplexMatrix& m, std::size_t i, std::size_t j, const GivensBlock& g) {
  const auto ci = static_cast<Eigen::Index>(i), cj = static_cast<Eigen::Index>(j);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Complex a = m(r, ci), b = m(r, cj);
    m(r, ci) = a * g.ii + b * g.ji;
    m(r, cj) = a * g.ij + b * g.jj;
  }
}

void apply_left_adjoint(ComplexMatrix& m, std::size_t i, std::size_t j, const GivensBlock& g) {
  const auto ri = static_cast<Eigen::Index>(i), rj = static_cast<Eigen::Index>(j);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const Complex a = m(ri, c), b = m(rj, c);
    m(ri, c) = std::conj(g.ii) * a + std::conj(g.ji) * b;
    m(rj, c) = std::conj(g.ij) * a + std::conj(g.jj) * b;
  }
}

}  // namespace detail

ComplexMatrix realize(const UnitaryParams& params) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(params.dim);
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) u(k, k) = std::polar(1.0, params.phases(k));

  const auto pairs = givens_pairs(params.dim);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    detail::apply_right(u, pairs[t].first, pairs[t].second,
                        detail::GivensBlock::make(params.angles(ti), params.phases(n + ti)));
  }
  return u;
}

// Commuting the diagonal through the product gives
//   D G_t(theta, p) = G_t(theta, p + a_i - a_j) D,
// so we first factor u = [prod_t G_t(theta, p')] D by Givens elimination of
// successive columns and then shift the relative phases back.
UnitaryParams decompose(const ComplexMatrix& u) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw InvalidParameter("decompose: expected a non-empty square matrix");
  }
  if (unitarity_defect(u) > 1e-10) throw InvalidParameter("decompose: matrix is not unitary");

  const auto n = static_cast<std::size_t>(u.rows());
  UnitaryParams p = UnitaryParams::zeros(n);
  const auto pairs = givens_pairs(n);

  ComplexMatrix m = u;
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = static_cast<Eigen::Index>(i);
    for (std::size_t j = i + 1; j < n; ++j, ++t) {
      const Complex a = m(ci, ci);
      const Complex b = m(static_cast<Eigen::Index>(j), ci);
      const double angle = std::atan2(std::abs(b), std::abs(a));
      const double arg_a = std::abs(a) > 0.0 ? std::arg(a) : 0.0;
      const double arg_b = std::abs(b) > 0.0 ? std::arg(b) : arg_a;
      const double phase = arg_a - arg_b;
      detail::apply_left_adjoint(m, i, j, detail::GivensBlock::make(angle, phase));
      p.angles(static_cast<Eigen::Index>(t)) = angle;
      p.phases(static_cast<Eigen::Index>(n + t)) = phase;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto ck = static_cast<Eigen::Index>(k);
    p.phases(ck) = std::arg(m(ck, ck));
  }
  for (t = 0; t < pairs.size(); ++t) {
    const auto [i, j] = pairs[t];
    const auto idx = static_cast<Eigen::Index>(n + t);
    p.phases(idx) = std::remainder(
        p.phases(idx) - (p.phases(static_cast<Eigen::Index>(i)) - p.phases(static_cast<Eigen::Index>(j))),
        kTwoPi);
  }
  return p;
}

UnitaryParams random_params(std::size_t dim, double angle_norm, double phase_norm, Rng& rng) {
  if (angle_norm < 0.0 || phase_norm < 0.0) {
    throw InvalidParameter("random_params: norms must be non-negative");
  }
  UnitaryParams p;
  p.dim = dim;
  p.angles = sphere_sample(static_cast<Eigen::Index>(UnitaryParams::angle_count(dim)), angle_norm, rng);
  p.phases = sphere_sample(static_cast<Eigen::Index>(UnitaryParams::phase_count(dim)), phase_norm, rng);
  return p;
}

UnitaryParams random_params(std::size_t dim, double angle_norm, double phase_norm,
                            std::uint64_t seed) {
  Rng rng(seed);
  return random_params(dim, angle_norm, phase_norm, rng);
}

UnitaryParams random_initial_params(std::size_t dim, Rng& rng) {
  UnitaryParams p = UnitaryParams::zeros(dim);
  for (Eigen::Index i = 0; i < p.phases.size(); ++i) p.phases(i) = rng.uniform(0.0, kTwoPi);
  for (Eigen::Index i = 0; i < p.angles.size(); ++i) p.angles(i) = rng.uniform(0.0, std::numbers::pi);
  return p;
}

}  // namespace mns
