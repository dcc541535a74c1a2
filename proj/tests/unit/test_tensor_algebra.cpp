#include <gtest/gtest.h>

#include "mns/error.hpp"
#include "mns/tensor_algebra.hpp"
#include "test_support.hpp"

namespace mns {
namespace {

ComplexMatrix pauli_z() {
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

TEST(PauliBasis, DimensionOneIsTheUnitScalar) {
  const PauliBasis b = pauli_basis(1);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0](0, 0), Complex(1.0));
}

TEST(PauliBasis, QubitBasisIsNormalizedPaulis) {
  const PauliBasis b = pauli_basis(2);
  ASSERT_EQ(b.size(), 4u);
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix x(2, 2), y(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  EXPECT_TRUE(b[0].isApprox(s * ComplexMatrix::Identity(2, 2), 1e-15));
  EXPECT_TRUE(b[1].isApprox(s * x, 1e-15));
  EXPECT_TRUE(b[2].isApprox(s * y, 1e-15));
  EXPECT_TRUE(b[3].isApprox(s * pauli_z(), 1e-15));
}

TEST(PauliBasis, GramMatrixIsIdentity) {
  for (std::size_t dim : {1u, 2u, 3u, 4u, 5u, 8u}) {
    const PauliBasis b = pauli_basis(dim);
    ASSERT_EQ(b.size(), dim * dim);
    const ComplexMatrix g = gram_matrix(b);
    const auto n = static_cast<Eigen::Index>(dim * dim);
    EXPECT_LE((g - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), kBasisTolerance) << "dim " << dim;
    EXPECT_TRUE(b[0].isApprox(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) /
                              std::sqrt(static_cast<double>(dim))));
    for (const auto& e : b.elements) EXPECT_TRUE(is_hermitian(e, kBasisTolerance));
  }
}

TEST(PauliBasis, QutritGramMatrixByExplicitTraces) {
  const PauliBasis b = pauli_basis(3);
  ASSERT_EQ(b.size(), 9u);
  for (std::size_t m = 0; m < 9; ++m) {
    for (std::size_t n = 0; n < 9; ++n) {
      const Complex t = (b[m] * b[n]).trace();
      EXPECT_NEAR(std::abs(t - Complex(m == n ? 1.0 : 0.0)), 0.0, 1e-12) << m << "," << n;
    }
  }
}

TEST(PauliBasis, ZeroDimensionThrows) { EXPECT_THROW(pauli_basis(0), InvalidDimension); }

TEST(Tensor, IdentityAndZ) {
  EXPECT_EQ(tensor(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)), ComplexMatrix::Identity(4, 4));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1, 1, -1, -1;
  EXPECT_EQ(tensor(pauli_z(), ComplexMatrix::Identity(2, 2)), expected);
}

TEST(Tensor, MixedProductRule) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = testing::ginibre(2, 2, rng), b = testing::ginibre(2, 2, rng);
    const ComplexMatrix c = testing::ginibre(2, 2, rng), d = testing::ginibre(2, 2, rng);
    EXPECT_LE((tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)).norm(), 1e-12);
  }
}

TEST(Tensor, AssociativeOnIntegerMatrices) {
  ComplexMatrix a(2, 2), b(2, 3), c(3, 2);
  a << 1, 2, 3, 4;
  b << 0, -1, 2, 5, 1, 1;
  c << 2, 0, -3, 1, 7, 4;
  EXPECT_EQ(tensor(tensor(a, b), c), tensor(a, tensor(b, c)));
}

TEST(PartialTrace, ProductStateAndMaximallyMixed) {
  Rng rng(3);
  const ComplexMatrix rho1 = random_density_matrix(2, rng);
  EXPECT_LE((partial_trace_2(tensor(rho1, ComplexMatrix::Identity(2, 2) / 2.0), 2, 2) - rho1).norm(), 1e-15);
  EXPECT_LE((partial_trace_2(ComplexMatrix::Identity(4, 4) / 4.0, 2, 2) - ComplexMatrix::Identity(2, 2) / 2.0).norm(),
            1e-15);
}

TEST(PartialTrace, MatchesIndexSum) {
  Rng rng(5);
  for (auto [n1, n2] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {2, 3}, {4, 1}}) {
    ComplexMatrix m = testing::ginibre(n1 * n2, n1 * n2, rng);
    m = (m + m.adjoint()).eval();
    const ComplexMatrix r = partial_trace_2(m, n1, n2);
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t ip = 0; ip < n1; ++ip) {
        Complex sum = 0.0;
        for (std::size_t j = 0; j < n2; ++j) sum += m(static_cast<Eigen::Index>(i * n2 + j), static_cast<Eigen::Index>(ip * n2 + j));
        EXPECT_LE(std::abs(r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip)) - sum), 1e-14);
      }
    }
    EXPECT_LE(std::abs(r.trace() - m.trace()), 1e-12);
  }
}

TEST(PartialTrace, Linear) {
  Rng rng(6);
  const ComplexMatrix a = testing::ginibre(6, 6, rng), b = testing::ginibre(6, 6, rng);
  const Complex s(0.3, -1.2);
  EXPECT_LE((partial_trace_2(a + s * b, 3, 2) - partial_trace_2(a, 3, 2) - s * partial_trace_2(b, 3, 2)).norm(), 1e-13);
}

TEST(PartialTrace, DimensionMismatchThrows) {
  EXPECT_THROW(partial_trace_2(ComplexMatrix::Identity(5, 5), 2, 2), InvalidDimension);
}

TEST(DirectSumEmbed, PlacesBlockTopLeft) {
  const ComplexMatrix e = direct_sum_embed(ComplexMatrix::Identity(4, 4) / 4.0, 8);
  ComplexMatrix expected = ComplexMatrix::Zero(8, 8);
  expected.diagonal().head(4).setConstant(0.25);
  EXPECT_EQ(e, expected);

  Rng rng(9);
  const ComplexMatrix rho1 = random_density_matrix(2, rng);
  EXPECT_NEAR(direct_sum_embed(tensor(rho1, ComplexMatrix::Identity(2, 2) / 2.0), 8).trace().real(), 1.0, 1e-14);

  const ComplexMatrix p = direct_sum_embed(ComplexMatrix::Identity(4, 4), 8);
  EXPECT_EQ(p * p, p);
  EXPECT_EQ(p.adjoint(), p);
}

TEST(DirectSumEmbed, OversizedBlockThrows) {
  EXPECT_THROW(direct_sum_embed(ComplexMatrix::Identity(9, 9), 8), InvalidDimension);
}

TEST(Helpers, TraceProductAndUnitarity) {
  Rng rng(12);
  const ComplexMatrix a = testing::ginibre(5, 5, rng), b = testing::ginibre(5, 5, rng);
  EXPECT_LE(std::abs(trace_product(a, b) - (a * b).trace()), 1e-12);
  const ComplexMatrix u = testing::haar_unitary(5, rng);
  EXPECT_TRUE(is_unitary(u, 1e-12));
  EXPECT_LE(unitarity_defect(u), 1e-13);
  EXPECT_FALSE(is_unitary(2.0 * u, 1e-6));
}

}  // namespace
}  // namespace mns
