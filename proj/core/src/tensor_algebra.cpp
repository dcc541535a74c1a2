#include "mns/tensor_algebra.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "mns/error.hpp"

namespace mns {

PauliBasis pauli_basis(std::size_t dim) {
  if (dim == 0) throw InvalidDimension("pauli_basis: dimension must be at least 1");

  const auto d = static_cast<Eigen::Index>(dim);
  PauliBasis basis;
  basis.dim = dim;
  basis.elements.reserve(dim * dim);

  basis.elements.push_back(ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(dim)));

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(d, d);
      s(j, k) = inv_sqrt2;
      s(k, j) = inv_sqrt2;
      basis.elements.push_back(std::move(s));
    }
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      ComplexMatrix a = ComplexMatrix::Zero(d, d);
      a(j, k) = Complex(0.0, -inv_sqrt2);
      a(k, j) = Complex(0.0, inv_sqrt2);
      basis.elements.push_back(std::move(a));
    }
  }
  for (Eigen::Index l = 1; l < d; ++l) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    ComplexMatrix z = ComplexMatrix::Zero(d, d);
    for (Eigen::Index m = 0; m < l; ++m) z(m, m) = norm;
    z(l, l) = -static_cast<double>(l) * norm;
    basis.elements.push_back(std::move(z));
  }
  return basis;
}

ComplexMatrix gram_matrix(const PauliBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix g(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k)
      g(m, k) = trace_product(basis.elements[m], basis.elements[k]);
  return g;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix partial_trace_2(const ComplexMatrix& m, std::size_t n1, std::size_t n2) {
  const auto d1 = static_cast<Eigen::Index>(n1);
  const auto d2 = static_cast<Eigen::Index>(n2);
  if (n1 == 0 || n2 == 0 || m.rows() != d1 * d2 || m.cols() != d1 * d2) {
    throw InvalidDimension("partial_trace_2: expected a " + std::to_string(n1 * n2) + "x" +
                           std::to_string(n1 * n2) + " matrix, got " + std::to_string(m.rows()) +
                           "x" + std::to_string(m.cols()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index k = 0; k < d1; ++k)
      for (Eigen::Index j = 0; j < d2; ++j) out(i, k) += m(i * d2 + j, k * d2 + j);
  return out;
}

ComplexMatrix direct_sum_embed(const ComplexMatrix& block, std::size_t total_dim) {
  const auto n = static_cast<Eigen::Index>(total_dim);
  if (block.rows() != block.cols() || block.rows() > n) {
    throw InvalidDimension("direct_sum_embed: block of size " + std::to_string(block.rows()) + "x" +
                           std::to_string(block.cols()) + " does not fit in dimension " +
                           std::to_string(total_dim));
  }
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  out.topLeftCorner(block.rows(), block.cols()) = block;
  return out;
}

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).norm() <= tol;
}

double unitarity_defect(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && unitarity_defect(m) <= tol;
}

}  // namespace mns
