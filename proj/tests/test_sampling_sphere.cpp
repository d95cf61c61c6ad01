#include "ipower/correlations.hpp"
#include "ipower/error.hpp"
#include "ipower/sampling.hpp"
#include "ipower/sphere.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ipower;
using qmat::BlochVector;

TEST(Sampling, SplitIsDeterministicAndIndependentOfOrder) {
  sampling::Rng a = sampling::split(42, 3);
  sampling::Rng b = sampling::split(42, 3);
  EXPECT_EQ(a(), b());
  EXPECT_NE(sampling::split(42, 3)(), sampling::split(42, 4)());
  EXPECT_NE(sampling::split(42, 3)(), sampling::split(43, 3)());
}

TEST(Sampling, HaarUnitaryIsUnitary) {
  sampling::Rng rng(1);
  for (int n = 1; n <= 8; ++n) {
    const auto u = sampling::haar_unitary(n, rng);
    EXPECT_LT((u.adjoint() * u - qmat::identity(n)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Sampling, MixedStateRankBoundedByEnvironment) {
  sampling::Rng rng(2);
  for (int env = 1; env <= 4; ++env) {
    const auto rho = sampling::random_mixed_state({2, 2}, env, rng);
    int rank = 0;
    for (double q : rho.probabilities()) rank += q > 1e-12 ? 1 : 0;
    EXPECT_EQ(rank, env);
  }
  EXPECT_NEAR(sampling::random_pure_state({2, 2}, rng).purity(), 1.0, 1e-12);
}

TEST(Sampling, ClassicalQuantumStatesHaveZeroIp) {
  sampling::Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    EXPECT_LE(correlations::ip_closed_form(sampling::random_classical_quantum_state({2, 2}, rng)),
              1e-10);
  }
}

TEST(Sampling, RemixKeepsTheState) {
  sampling::Rng rng(4);
  qmat::RealVector q(4);
  q << 0.25, 0.25, 0.25, 0.25;
  const auto rho = qmat::DensityMatrix::from_spectrum(q, sampling::haar_unitary(4, rng), {2, 2});
  const auto remixed = sampling::remix_degenerate_eigenspaces(rho, rng);
  EXPECT_LT((remixed.matrix() - rho.matrix()).norm(), 1e-12);
  EXPECT_GT((remixed.eigenvectors() - rho.eigenvectors()).norm(), 1e-3);
}

TEST(Sampling, UnitVectorsAreUnit) {
  sampling::Rng rng(5);
  for (int t = 0; t < 100; ++t) EXPECT_NEAR(sampling::random_unit_vector(rng).norm(), 1.0, 1e-14);
}

TEST(Sphere, QuadraticFormMinimum) {
  Eigen::Matrix3d m;
  m << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 0.5;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
  const auto f = [&m](const BlochVector& n) { return n.dot(m * n); };
  const sphere::Minimum coarse = sphere::minimize(f, {128, 256, false});
  EXPECT_GE(coarse.value, solver.eigenvalues()(0) - 1e-12);
  EXPECT_LE(coarse.value - solver.eigenvalues()(0), coarse.error_bound);
  EXPECT_NEAR(coarse.grid_max, solver.eigenvalues()(2), 1e-3);
  const sphere::Minimum fine = sphere::minimize(f, {32, 64, true});
  EXPECT_NEAR(fine.value, solver.eigenvalues()(0), 1e-10);
  const sphere::Minimum top = sphere::maximize(f, {128, 256, false});
  EXPECT_NEAR(top.value, solver.eigenvalues()(2), 1e-3);
}

TEST(Sphere, GridIncludesPolesAndBreaksTiesByLowestIndex) {
  const auto constant = [](const BlochVector&) { return 1.0; };
  const sphere::Minimum m = sphere::minimize(constant, {5, 8, false});
  EXPECT_EQ(m.theta, 0.0);
  EXPECT_EQ(m.phi, 0.0);
  const auto z = [](const BlochVector& n) { return n.z(); };
  const sphere::Minimum south = sphere::minimize(z, {5, 8, false});
  EXPECT_NEAR(south.theta, std::numbers::pi, 1e-15);
  EXPECT_NEAR(south.value, -1.0, 1e-15);
}

TEST(Sphere, RejectsDegenerateGrids) {
  const auto f = [](const BlochVector& n) { return n.x(); };
  EXPECT_THROW(sphere::minimize(f, {1, 8, false}), Error);
  EXPECT_THROW(sphere::minimize(f, {8, 0, false}), Error);
}
