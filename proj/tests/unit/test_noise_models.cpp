#include <gtest/gtest.h>

#include <cmath>

#include "mns/error.hpp"
#include "mns/noise_models.hpp"
#include "mns/unitary_parametrization.hpp"
#include "test_support.hpp"

namespace mns {
namespace {

double channel_distance(const KrausChannel& a, const KrausChannel& b, std::size_t samples, Rng& rng) {
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const ComplexMatrix rho = random_density_matrix(a.dim, rng);
    worst = std::max(worst, (a.apply(rho) - b.apply(rho)).norm());
  }
  return worst;
}

TEST(CollectiveOperators, SingleQubit) {
  const LindbladModel m = collective_xz(1, 0.5, 2.0);
  ASSERT_EQ(m.terms.size(), 2u);
  EXPECT_EQ(m.terms[0].op, pauli_matrix(Pauli::X));
  EXPECT_EQ(m.terms[1].op, pauli_matrix(Pauli::Z));
  EXPECT_EQ(m.terms[0].rate, 0.5);
  EXPECT_EQ(m.terms[1].rate, 2.0);
}

TEST(CollectiveOperators, ThreeQubitSzIsDiagonal) {
  const ComplexMatrix sz = collective_pauli(3, Pauli::Z);
  Eigen::VectorXd expected(8);
  expected << 3, 1, 1, -1, 1, -1, -1, -3;
  EXPECT_EQ(sz, ComplexMatrix(expected.cast<Complex>().asDiagonal()));
  const ComplexMatrix sx = collective_pauli(3, Pauli::X);
  for (const ComplexMatrix* op : {&sz, &sx}) {
    EXPECT_TRUE(is_hermitian(*op, 0.0));
    EXPECT_EQ(op->trace(), Complex(0.0));
  }
}

TEST(CollectiveOperators, LocalPauliEmbedding) {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  EXPECT_EQ(local_pauli(3, 1, Pauli::Z), tensor(tensor(id, pauli_matrix(Pauli::Z)), id));
  EXPECT_EQ(local_pauli(3, 0, Pauli::X), tensor(pauli_matrix(Pauli::X), ComplexMatrix::Identity(4, 4)));
}

TEST(CollectiveXz, NegativeRateThrows) { EXPECT_THROW(collective_xz(3, -1.0, 1.0), InvalidParameter); }

TEST(LocalDephasing, TermsAndRates) {
  const LindbladModel m = collective_z_with_local_dephasing(3, 1.0, 0.1, {0.33, 0.47, 0.85});
  ASSERT_EQ(m.terms.size(), 4u);
  EXPECT_EQ(m.terms[0].op, collective_pauli(3, Pauli::Z));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(m.terms[k + 1].op, local_pauli(3, k, Pauli::Z));
  }
  EXPECT_DOUBLE_EQ(m.terms[1].rate, 0.033);
  EXPECT_DOUBLE_EQ(m.terms[2].rate, 0.047);
  EXPECT_DOUBLE_EQ(m.terms[3].rate, 0.085);
}

TEST(LocalDephasing, ZeroDeltaMatchesCollectiveZ) {
  Rng rng(21);
  const double dt = 1e-3;
  const KrausChannel a = lindblad_to_kraus(collective_z_with_local_dephasing(3, 1.0, 0.0, {0.33, 0.47, 0.85}), dt);
  const KrausChannel b = lindblad_to_kraus(collective_xz(3, 0.0, 1.0), dt);
  EXPECT_LE(channel_distance(a, b, 10, rng), 1e-15);
}

TEST(LocalDephasing, WrongRateCountThrows) {
  EXPECT_THROW(collective_z_with_local_dephasing(3, 1.0, 0.1, {0.3, 0.4}), InvalidParameter);
}

TEST(PerturbedCollective, IdentityPerturbationRecoversCollectiveModel) {
  Rng rng(22);
  const KrausChannel a =
      lindblad_to_kraus(perturbed_collective(3, 0.7, 1.3, ComplexMatrix::Identity(8, 8)), 1e-3);
  const KrausChannel b = lindblad_to_kraus(collective_xz(3, 0.7, 1.3), 1e-3);
  EXPECT_LE(channel_distance(a, b, 10, rng), 1e-15);
}

TEST(PerturbedCollective, ConjugatedOperatorKeepsSpectrum) {
  const ComplexMatrix v = random_perturbation_unitary(8, 0.3, PerturbationMode::Global, 5);
  const LindbladModel m = perturbed_collective(3, 1.0, 1.0, v);
  const ComplexMatrix& op = m.terms[0].op;
  EXPECT_TRUE(is_hermitian(op, 1e-12));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> a(op), b(collective_pauli(3, Pauli::X));
  EXPECT_LE((a.eigenvalues() - b.eigenvalues()).norm(), 1e-12);
}

TEST(PerturbedCollective, NonUnitaryThrows) {
  EXPECT_THROW(perturbed_collective(3, 1.0, 1.0, 1.01 * ComplexMatrix::Identity(8, 8)), InvalidParameter);
}

TEST(PerturbedCollective, DeviationGrowsAlongARay) {
  const ComplexMatrix sx = collective_pauli(3, Pauli::X);
  double previous = -1.0;
  for (int i = 0; i <= 10; ++i) {
    const double delta = 0.01 * i;
    const ComplexMatrix v = random_perturbation_unitary(8, delta, PerturbationMode::Global, 17);
    const double dev = (v * sx * v.adjoint() - sx).norm();
    EXPECT_GT(dev, previous) << "delta " << delta;
    previous = dev;
  }
}

TEST(PerturbationUnitary, ZeroDeltaIsExactIdentity) {
  for (auto mode : {PerturbationMode::Global, PerturbationMode::LocalTensor}) {
    EXPECT_EQ(random_perturbation_unitary(8, 0.0, mode, 3), ComplexMatrix::Identity(8, 8));
  }
}

TEST(PerturbationUnitary, UnitaryAndReproducible) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const double delta = rng.uniform(0.0, 0.5);
    for (auto mode : {PerturbationMode::Global, PerturbationMode::LocalTensor}) {
      const ComplexMatrix v = random_perturbation_unitary(8, delta, mode, 100 + trial);
      EXPECT_LE(unitarity_defect(v), 1e-10);
      EXPECT_EQ(v, random_perturbation_unitary(8, delta, mode, 100 + trial));
    }
  }
}

TEST(PerturbationUnitary, GlobalAngleNorm) {
  Rng rng(4);
  const UnitaryParams p = random_params(8, 0.07, 0.0, rng);
  EXPECT_NEAR(p.angles.norm(), 0.07, 1e-15);
  EXPECT_EQ(p.phases.norm(), 0.0);
}

TEST(PerturbationUnitary, LocalFactorsBreakPermutationSymmetry) {
  // Independent per-qubit rotations make V S_x V^dag non-collective: it no
  // longer commutes with the qubit swap.
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  const ComplexMatrix sx = collective_pauli(2, Pauli::X);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ComplexMatrix v = random_perturbation_unitary(4, 0.1, PerturbationMode::LocalTensor, seed);
    const ComplexMatrix op = v * sx * v.adjoint();
    EXPECT_GT((swap * op * swap - op).norm(), 1e-3) << "seed " << seed;
    EXPECT_LT((v - ComplexMatrix::Identity(4, 4)).norm(), 0.3);
  }
}

TEST(LindbladToKraus, EmptyModelGivesIdentity) {
  LindbladModel m;
  m.n_qubits = 2;
  const KrausChannel ch = lindblad_to_kraus(m, 1e-3);
  ASSERT_EQ(ch.operators.size(), 1u);
  EXPECT_EQ(ch.operators[0], ComplexMatrix::Identity(4, 4));
  EXPECT_EQ(ch.completeness_defect(), 0.0);
}

TEST(LindbladToKraus, SingleQubitDephasingForm) {
  LindbladModel m;
  m.n_qubits = 1;
  m.terms.push_back({0.8, pauli_matrix(Pauli::Z), "Z"});
  const double dt = 1e-3;
  const KrausChannel ch = lindblad_to_kraus(m, dt);
  ASSERT_EQ(ch.operators.size(), 2u);
  EXPECT_LE((ch.operators[0] - (1.0 - 0.8 * dt / 2.0) * ComplexMatrix::Identity(2, 2)).norm(), 1e-16);
  EXPECT_LE((ch.operators[1] - std::sqrt(0.8 * dt) * pauli_matrix(Pauli::Z)).norm(), 1e-16);
}

TEST(LindbladToKraus, NonPositiveStepThrows) {
  EXPECT_THROW(lindblad_to_kraus(collective_xz(3, 1, 1), 0.0), InvalidParameter);
  EXPECT_THROW(lindblad_to_kraus(collective_xz(3, 1, 1), -1e-3), InvalidParameter);
}

TEST(LindbladToKraus, CompletenessDefectScalesQuadratically) {
  const std::vector<LindbladModel> models = {
      collective_xz(3, 1.0, 1.0), collective_z_with_local_dephasing(3, 1.0, 0.1, {0.33, 0.47, 0.85}),
      perturbed_collective(3, 1.0, 1.0, random_perturbation_unitary(8, 0.1, PerturbationMode::Global, 7))};
  for (const auto& m : models) {
    const double dt = default_time_step(m);
    const double d1 = lindblad_to_kraus(m, dt).completeness_defect();
    const double d2 = lindblad_to_kraus(m, dt / 2).completeness_defect();
    EXPECT_GE(d1 / d2, 3.5);
    EXPECT_LE(d1 / d2, 4.5);
    EXPECT_LT(d1, 1e-4);
  }
}

// One Kraus step equals rho + dt sum_i g_i D[V_i] rho + (dt^2/4) K rho K with
// K = sum_i g_i V_i^dag V_i, so the distance to the Euler step is bounded by
// c dt^2 with c = ||K||_2^2 / 4.
TEST(LindbladToKraus, AgreesWithEulerStepToSecondOrder) {
  Rng rng(31);
  const std::vector<LindbladModel> models = {
      collective_xz(3, 1.0, 1.0), collective_z_with_local_dephasing(3, 1.0, 0.1, {0.33, 0.47, 0.85}),
      perturbed_collective(3, 1.0, 1.0, random_perturbation_unitary(8, 0.1, PerturbationMode::Global, 7))};
  for (const auto& m : models) {
    ComplexMatrix k = ComplexMatrix::Zero(8, 8);
    for (const auto& t : m.terms) k += t.rate * t.op.adjoint() * t.op;
    const double c = 0.25 * std::pow(Eigen::JacobiSVD<ComplexMatrix>(k).singularValues()(0), 2);
    for (double dt : {1e-2, 1e-3, 1e-4}) {
      const KrausChannel ch = lindblad_to_kraus(m, dt);
      for (int s = 0; s < 5; ++s) {
        const ComplexMatrix rho = random_density_matrix(8, rng);
        const ComplexMatrix euler = rho + dt * m.dissipator(rho);
        EXPECT_LE((ch.apply(rho) - euler).norm(), c * dt * dt * (1 + 1e-9) + 1e-15);
      }
    }
  }
}

TEST(Dissipator, MatchesDefinition) {
  Rng rng(32);
  LindbladModel m;
  m.n_qubits = 1;
  const ComplexMatrix v = testing::ginibre(2, 2, rng);
  m.terms.push_back({0.4, v, "V"});
  const ComplexMatrix rho = random_density_matrix(2, rng);
  const ComplexMatrix vdv = v.adjoint() * v;
  const ComplexMatrix expected = 0.4 * (v * rho * v.adjoint() - 0.5 * (vdv * rho + rho * vdv));
  EXPECT_LE((m.dissipator(rho) - expected).norm(), 1e-14);
}

TEST(DfsCheck, KnownCollectiveEncodingPasses) {
  const KnownEncoding k = collective_dfs_encoding(3);
  EXPECT_EQ(k.n1, 2u);
  EXPECT_EQ(k.n2, 2u);
  EXPECT_LE(unitarity_defect(k.u), 1e-12);
  const KrausChannel ch = lindblad_to_kraus(collective_xz(3, 1.0, 1.0), 1e-3);
  const DfsCheck c = dfs_check(ch, k.u, 2, 2);
  EXPECT_TRUE(c.is_dfs);
  EXPECT_LE(c.defect, 1e-10);
}

TEST(DfsCheck, KrausStepLeavesEncodedStateUnchanged) {
  Rng rng(33);
  const KnownEncoding k = collective_dfs_encoding(3);
  const KrausChannel ch = lindblad_to_kraus(collective_xz(3, 1.0, 1.0), 1e-3);
  for (int s = 0; s < 5; ++s) {
    const ComplexMatrix rho1 = random_density_matrix(2, rng);
    const ComplexMatrix rho =
        k.u.adjoint() * direct_sum_embed(tensor(rho1, ComplexMatrix::Identity(2, 2) / 2.0), 8) * k.u;
    // Without renormalization the step returns (1 + dt^2) rho exactly on
    // this block (K = S_x^2 + S_z^2 acts as 2 there); the state itself is
    // unchanged.
    const ComplexMatrix out = ch.apply(rho);
    EXPECT_LE((out / out.trace().real() - rho).norm(), 1e-12);
    EXPECT_NEAR(out.trace().real(), 1.0 + 1e-6, 1e-12);
  }
}

TEST(DfsCheck, RandomEncodingFails) {
  Rng rng(34);
  const KrausChannel ch = lindblad_to_kraus(collective_xz(3, 1.0, 1.0), 1e-3);
  for (int trial = 0; trial < 20; ++trial) {
    const DfsCheck c = dfs_check(ch, testing::haar_unitary(8, rng), 2, 2);
    EXPECT_FALSE(c.is_dfs);
    EXPECT_GT(c.defect, 1e-4);
  }
}

TEST(DfsCheck, IdentityChannelHasZeroDefect) {
  Rng rng(35);
  const DfsCheck c = dfs_check(KrausChannel::identity(8), testing::haar_unitary(8, rng), 2, 2);
  EXPECT_TRUE(c.is_dfs);
  EXPECT_EQ(c.defect, 0.0);
}

TEST(DfsCheck, UnperturbedLocalDephasingModelHasTwoQutritDfs) {
  const KrausChannel ch = lindblad_to_kraus(collective_z_with_local_dephasing(3, 1.0, 0.0, {0.33, 0.47, 0.85}), 1e-3);
  // Rows of U pick the encoded basis states: weight-1 states, then weight-2.
  for (const std::vector<int>& order : {std::vector<int>{1, 2, 4, 0, 3, 5, 6, 7}, std::vector<int>{3, 5, 6, 0, 1, 2, 4, 7}}) {
    ComplexMatrix u = ComplexMatrix::Zero(8, 8);
    for (int r = 0; r < 8; ++r) u(r, order[static_cast<std::size_t>(r)]) = 1.0;
    EXPECT_TRUE(dfs_check(ch, u, 3, 1).is_dfs);
  }
  const KrausChannel perturbed =
      lindblad_to_kraus(collective_z_with_local_dephasing(3, 1.0, 0.1, {0.33, 0.47, 0.85}), 1e-3);
  ComplexMatrix u = ComplexMatrix::Zero(8, 8);
  const int order[] = {1, 2, 4, 0, 3, 5, 6, 7};
  for (int r = 0; r < 8; ++r) u(r, order[r]) = 1.0;
  EXPECT_FALSE(dfs_check(perturbed, u, 3, 1).is_dfs);
}

TEST(DefaultTimeStep, ScalesWithLargestRate) {
  EXPECT_DOUBLE_EQ(default_time_step(collective_xz(3, 1.0, 4.0)), 2.5e-4);
  EXPECT_DOUBLE_EQ(default_time_step(collective_xz(3, 0.0, 0.0)), 1e-3);
}

}  // namespace
}  // namespace mns
