#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "mns/error.hpp"
#include "mns/fidelity_eval.hpp"
#include "mns/noise_models.hpp"
#include "test_support.hpp"

namespace mns {
namespace {

using testing::haar_state;
using testing::haar_unitary;
using testing::min_eigenvalue;

LindbladModel dephasing(double gamma) {
  LindbladModel m;
  m.n_qubits = 1;
  m.terms.push_back({gamma, pauli_matrix(Pauli::Z), "Z"});
  return m;
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

TEST(Evolve, ZeroTimeIsIdentity) {
  const EvolvedChannel e = evolve(collective_xz(2, 1.0, 0.5), 0.0);
  EXPECT_LT((e.superoperator - ComplexMatrix::Identity(16, 16)).norm(), 1e-14);
}

TEST(Evolve, NegativeTimeThrows) { EXPECT_THROW(evolve(dephasing(1.0), -0.1), InvalidParameter); }

TEST(Evolve, DephasingCoherence) {
  const double gamma = 0.7;
  const ComplexMatrix rho = (ComplexMatrix(2, 2) << 0.6, Complex(0.2, 0.3), Complex(0.2, -0.3), 0.4).finished();
  for (double t : {0.1, 0.5, 2.0}) {
    const ComplexMatrix out = evolve(dephasing(gamma), t).apply(rho);
    EXPECT_NEAR(std::abs(out(0, 1) - rho(0, 1) * std::exp(-2.0 * gamma * t)), 0.0, 1e-12);
    EXPECT_NEAR(out(0, 0).real(), 0.6, 1e-12);
    EXPECT_NEAR(out(1, 1).real(), 0.4, 1e-12);
  }
}

TEST(Evolve, LiouvillianMatchesDissipator) {
  const LindbladModel m = collective_xz(2, 0.3, 0.9);
  Rng rng(1);
  const ComplexMatrix rho = random_density_matrix(4, rng);
  const ComplexVector v = liouvillian(m) * rho.reshaped();
  EXPECT_LT((v.reshaped(4, 4) - m.dissipator(rho)).norm(), 1e-12);
}

TEST(Evolve, TracePreservingAndCompletelyPositive) {
  Rng rng(2);
  const LindbladModel m = perturbed_collective(3, 1.0, 1.0, random_perturbation_unitary(8, 0.1, PerturbationMode::Global, 3));
  const EvolvedChannel e = evolve(m, 1.0);
  for (int s = 0; s < 10; ++s) {
    const ComplexMatrix rho = random_density_matrix(8, rng);
    EXPECT_NEAR(e.apply(rho).trace().real(), 1.0, 1e-10);
  }
  EXPECT_GE(min_eigenvalue(e.choi()), -1e-9);
}

TEST(Evolve, NoiselessSubsystemUnchanged) {
  const LindbladModel m = collective_xz(3, 1.0, 1.0);
  const EvolvedChannel e = evolve(m, 1.0);
  const KnownEncoding enc = collective_dfs_encoding(3);
  const Dims dims = Dims::make(2, 2, 8);
  Rng rng(4);
  for (int s = 0; s < 5; ++s) {
    const ComplexMatrix rho1 = random_density_matrix(2, rng);
    const ComplexMatrix rho = encode(rho1, enc.u, dims);
    const ComplexMatrix out = e.apply(rho);
    EXPECT_LT((out - rho).norm(), 1e-9);
    EXPECT_LT((decode(out, enc.u, dims).state - rho1).norm(), 1e-9);
  }
}

TEST(EncodeDecode, RoundTrip) {
  Rng rng(5);
  const Dims dims = Dims::make(2, 3, 8);
  const ComplexMatrix u = haar_unitary(8, rng);
  for (int s = 0; s < 10; ++s) {
    const ComplexMatrix rho1 = random_density_matrix(2, rng);
    const ComplexMatrix rho = encode(rho1, u, dims);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    const DecodedState d = decode(rho, u, dims);
    EXPECT_NEAR(d.leakage, 0.0, 1e-12);
    EXPECT_LT((d.state - rho1).norm(), 1e-12);
  }
}

TEST(EncodeDecode, EncodedRankOfPureState) {
  Rng rng(6);
  const Dims dims = Dims::make(2, 3, 8);
  const ComplexMatrix rho = encode(projector(haar_state(2, rng)), haar_unitary(8, rng), dims);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho, Eigen::EigenvaluesOnly);
  int rank = 0;
  for (Eigen::Index i = 0; i < 8; ++i) rank += eig.eigenvalues()(i) > 1e-10 ? 1 : 0;
  EXPECT_LE(rank, 3);
}

TEST(EncodeDecode, InvalidStatesThrow) {
  const ComplexMatrix u = ComplexMatrix::Identity(4, 4);
  const Dims dims = Dims::make(2, 2, 4);
  ComplexMatrix not_hermitian = ComplexMatrix::Identity(2, 2) / 2.0;
  not_hermitian(0, 1) = 0.1;
  EXPECT_THROW(encode(not_hermitian, u, dims), InvalidState);
  EXPECT_THROW(encode(ComplexMatrix::Identity(2, 2), u, dims), InvalidState);
  const ComplexMatrix negative = (ComplexMatrix(2, 2) << 1.5, 0.0, 0.0, -0.5).finished();
  EXPECT_THROW(encode(negative, u, dims), InvalidState);
  EXPECT_THROW(encode(ComplexMatrix::Identity(3, 3) / 3.0, u, dims), InvalidState);
}

TEST(EncodeDecode, LeakageBookkeeping) {
  const Dims dims = Dims::make(2, 1, 4);
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.2;
  rho(2, 2) = 0.5;
  const DecodedState d = decode(rho, ComplexMatrix::Identity(4, 4), dims);
  EXPECT_NEAR(d.leakage, 0.5, 1e-15);
  EXPECT_NEAR(d.state.trace().real(), 0.5, 1e-15);
  const ComplexMatrix n = d.normalized();
  EXPECT_NEAR(n(0, 0).real(), 0.6, 1e-15);
  EXPECT_NEAR(n(1, 1).real(), 0.4, 1e-15);
}

TEST(EncodeDecode, LeakyChannel) {
  // Amplitude damping from |1> (encoded) into |2> (outside the block).
  LindbladModel m;
  m.n_qubits = 2;
  ComplexMatrix jump = ComplexMatrix::Zero(4, 4);
  jump(2, 1) = 1.0;
  m.terms.push_back({0.5, jump, "leak"});
  const Dims dims = Dims::make(2, 1, 4);
  const ComplexMatrix u = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix rho1 = (ComplexMatrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();
  const DecodedState d = decode(evolve(m, 1.0).apply(encode(rho1, u, dims)), u, dims);
  EXPECT_NEAR(d.leakage, 0.5 * (1.0 - std::exp(-0.5)), 1e-12);
  EXPECT_NEAR(d.state.trace().real(), 1.0 - d.leakage, 1e-12);
}

TEST(WorstCaseFidelity, IdentityEvolution) {
  Rng rng(7);
  const Dims dims = Dims::make(2, 2, 8);
  const EvolvedChannel e = evolve(collective_xz(3, 0.0, 0.0), 1.0);
  EXPECT_NEAR(worst_case_fidelity(haar_unitary(8, rng), dims, e).value, 1.0, 1e-12);
}

TEST(WorstCaseFidelity, NoiselessSubsystem) {
  const KnownEncoding enc = collective_dfs_encoding(3);
  const WorstCaseFidelity w = worst_case_fidelity(enc.u, Dims::make(2, 2, 8), evolve(collective_xz(3, 1.0, 1.0), 1.0));
  EXPECT_GE(w.value, 1.0 - 1e-6);
  EXPECT_LE(w.value, 1.0 + 1e-9);
}

TEST(WorstCaseFidelity, SingleQubitDephasing) {
  const Dims dims = Dims::make(2, 1, 2);
  const ComplexMatrix u = ComplexMatrix::Identity(2, 2);
  for (double gt : {0.05, 0.3, 1.0}) {
    const WorstCaseFidelity w = worst_case_fidelity(u, dims, evolve(dephasing(1.0), gt));
    EXPECT_NEAR(w.value, 0.5 * (1.0 + std::exp(-2.0 * gt)), 1e-6) << "gamma t = " << gt;
    // The minimizer sits on the equator.
    EXPECT_NEAR(std::abs(w.state(0)), std::sqrt(0.5), 1e-3);
  }
}

TEST(WorstCaseFidelity, BelowSampledStates) {
  Rng rng(8);
  const LindbladModel m = perturbed_collective(3, 1.0, 1.0, random_perturbation_unitary(8, 0.1, PerturbationMode::Global, 9));
  const EvolvedChannel e = evolve(m, 1.0);
  for (const Dims dims : {Dims::make(2, 2, 8), Dims::make(3, 1, 8)}) {
    const ComplexMatrix u = haar_unitary(8, rng);
    const double wc = worst_case_fidelity(u, dims, e).value;
    double lowest = 2.0, mean = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const double f = state_fidelity(u, dims, e, haar_state(dims.n1, rng));
      lowest = std::min(lowest, f);
      mean += f / 1000.0;
    }
    EXPECT_LE(wc, lowest + 1e-9) << "N1 = " << dims.n1;
    EXPECT_LE(wc, mean);
    EXPECT_GE(wc, 0.0);
  }
}

TEST(WorstCaseFidelity, DecreasesWithTime) {
  Rng rng(10);
  const ComplexMatrix u = haar_unitary(8, rng);
  const Dims dims = Dims::make(2, 2, 8);
  const LindbladModel m = collective_xz(3, 1.0, 1.0);
  double previous = 1.0 + 1e-9;
  for (double t : {0.0, 0.05, 0.2, 0.5}) {
    const double wc = worst_case_fidelity(u, dims, evolve(m, t)).value;
    EXPECT_LE(wc, previous + 1e-9) << "t = " << t;
    previous = wc;
  }
}

TEST(StateFidelity, LeakageCountsAsInfidelity) {
  LindbladModel m;
  m.n_qubits = 2;
  ComplexMatrix jump = ComplexMatrix::Zero(4, 4);
  jump(2, 0) = 1.0;
  m.terms.push_back({1.0, jump, "leak"});
  const ComplexVector zero = ComplexVector::Unit(2, 0);
  EXPECT_NEAR(state_fidelity(ComplexMatrix::Identity(4, 4), Dims::make(2, 1, 4), evolve(m, 1.0), zero),
              std::exp(-1.0), 1e-12);
}

ModelFamily perturbed_family() {
  return [](double delta) {
    return perturbed_collective(3, 1.0, 1.0, random_perturbation_unitary(8, delta, PerturbationMode::Global, 7));
  };
}

ReferenceEncoding reference() {
  const KnownEncoding enc = collective_dfs_encoding(3);
  return {enc.u, Dims::make(enc.n1, enc.n2, 8)};
}

TEST(FidelitySweep, DeltaEndpointsAndOrdering) {
  SearchConfig c;
  c.num_restarts = 4;
  SweepSpec spec;
  spec.grid = {0.1, 0.0};
  const auto pts = fidelity_sweep(perturbed_family(), c, Dims::make(2, 2, 8), reference(), spec);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].param, 0.0);
  EXPECT_EQ(pts[1].param, 0.1);
  EXPECT_NEAR(pts[0].fi_mns, 1.0, 1e-6);
  EXPECT_NEAR(pts[0].fi_dfs, 1.0, 1e-6);
  EXPECT_GE(pts[1].fi_mns, pts[1].fi_dfs - 1e-9);
  EXPECT_LT(pts[1].fi_dfs, 1.0 - 1e-4);
  for (const auto& p : pts) {
    EXPECT_LE(p.fi_mns, 1.0 + 1e-9);
    EXPECT_LE(p.fi_dfs, 1.0 + 1e-9);
    EXPECT_GE(p.fi_dfs, 0.0);
  }
}

TEST(FidelitySweep, TimeSweepStartsAtOne) {
  SearchConfig c;
  c.num_restarts = 2;
  SweepSpec spec;
  spec.kind = SweepKind::Time;
  spec.delta = 0.1;
  spec.grid = {0.0, 0.1};
  const auto pts = fidelity_sweep(perturbed_family(), c, Dims::make(2, 2, 8), reference(), spec);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].fi_mns, 1.0, 1e-12);
  EXPECT_NEAR(pts[0].fi_dfs, 1.0, 1e-12);
  EXPECT_EQ(pts[0].j_opt, pts[1].j_opt);
  EXPECT_LT(pts[1].fi_dfs, 1.0);
}

TEST(FidelitySweep, FailuresBecomeFlaggedRows) {
  const ModelFamily base = perturbed_family();
  const ModelFamily family = [&](double delta) -> LindbladModel {
    if (delta > 0.05) throw std::runtime_error("no model");
    return base(delta);
  };
  SearchConfig c;
  c.num_restarts = 2;
  SweepSpec spec;
  spec.grid = {0.0, 0.1};
  const auto pts = fidelity_sweep(family, c, Dims::make(2, 2, 8), reference(), spec);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_TRUE(std::isfinite(pts[0].fi_mns));
  EXPECT_TRUE(std::isnan(pts[1].fi_mns));
  EXPECT_TRUE(std::isnan(pts[1].fi_dfs));
  EXPECT_FALSE(pts[1].converged);
}

TEST(FidelitySweep, InvalidSpecThrows) {
  SweepSpec spec;
  EXPECT_THROW(fidelity_sweep(perturbed_family(), SearchConfig{}, Dims::make(2, 2, 8), reference(), spec),
               InvalidParameter);
  spec.grid = {0.0};
  EXPECT_THROW(fidelity_sweep(perturbed_family(), SearchConfig{}, Dims::make(3, 1, 8), reference(), spec),
               InvalidDimension);
}

}  // namespace
}  // namespace mns
