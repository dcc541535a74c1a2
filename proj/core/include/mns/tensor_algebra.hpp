#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mns {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Tolerance used for Hermiticity and orthonormality checks.
inline constexpr double kBasisTolerance = 1e-12;

/// Orthonormal Hermitian operator basis of a dim-dimensional space.
///
/// Element 0 is I/sqrt(dim). The remaining dim^2 - 1 elements are the
/// normalized generalized Gell-Mann matrices in this fixed order:
///   1. symmetric   (E_jk + E_kj)/sqrt(2)        for j < k, lexicographic
///   2. antisymmetric (-i E_jk + i E_kj)/sqrt(2) for j < k, lexicographic
///   3. diagonal    (sum_{m<l} E_mm - l E_ll)/sqrt(l(l+1)) for l = 1..dim-1
/// so that Tr(s_m s_n) = delta_mn. For dim = 2 this is {I, X, Y, Z}/sqrt(2).
struct PauliBasis {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> elements;

  std::size_t size() const { return elements.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return elements[i]; }
};

PauliBasis pauli_basis(std::size_t dim);

/// Gram matrix G_mn = Tr(s_m s_n) of a basis.
ComplexMatrix gram_matrix(const PauliBasis& basis);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out the second factor of an (n1*n2)-dimensional operator, using
/// the index convention |i, j> -> i*n2 + j.
ComplexMatrix partial_trace_2(const ComplexMatrix& m, std::size_t n1, std::size_t n2);

/// Places `block` in the top-left corner of a total_dim x total_dim zero
/// matrix. The encoded subsystem always occupies the leading coordinates.
ComplexMatrix direct_sum_embed(const ComplexMatrix& block, std::size_t total_dim);

/// Trace of a product, Tr(a b), without forming the product.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol);
bool is_unitary(const ComplexMatrix& m, double tol);

/// Frobenius norm of U^dagger U - I.
double unitarity_defect(const ComplexMatrix& u);

}  // namespace mns
