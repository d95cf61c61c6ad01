#include "ipower/correlations.hpp"
#include "ipower/error.hpp"
#include "ipower/probes.hpp"
#include "ipower/sampling.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ipower;
using namespace ipower::correlations;
using qmat::BlochVector;
using qmat::DensityMatrix;
using qmat::LocalHamiltonian;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix q_state(double p) { return probes::make_probe(probes::q_probe(p)); }
DensityMatrix c_state(double p) { return probes::make_probe(probes::c_probe(p)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an ipower::Error";
  return ErrorKind::ParseError;
}

Eigen::Vector3d sorted_eigenvalues(const Eigen::Matrix3d& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues();
}

}  // namespace

TEST(Qfi, MatchesLyapunovOracleOnRandomStates) {
  sampling::Rng rng(101);
  for (int t = 0; t < 40; ++t) {
    const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 1 + t % 4, rng);
    const BlochVector n = sampling::random_unit_vector(rng);
    const double expected =
        oracle::lyapunov_qfi(rho.matrix(), oracle::kron(oracle::n_sigma(n), Eigen::MatrixXcd::Identity(2, 2)));
    EXPECT_NEAR(qfi(rho, LocalHamiltonian::from_bloch(n)), expected, 1e-8) << "trial " << t;
  }
}

TEST(Qfi, PureStateIsFourTimesVariance) {
  sampling::Rng rng(102);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = sampling::random_pure_state({2, 2}, rng);
    const LocalHamiltonian h = LocalHamiltonian::from_bloch(sampling::random_unit_vector(rng));
    EXPECT_NEAR(qfi(rho, h), 4.0 * local_variance(rho, h), 1e-10);
  }
}

TEST(Qfi, QubitQfiAgreesWithGeneralRoute) {
  sampling::Rng rng(103);
  const DensityMatrix rho = sampling::random_mixed_state({2, 3}, 3, rng);
  const QubitQfi fast(rho);
  for (int t = 0; t < 20; ++t) {
    const BlochVector n = sampling::random_unit_vector(rng);
    EXPECT_NEAR(fast(n), qfi(rho, LocalHamiltonian::from_bloch(n)), 1e-12);
  }
}

TEST(Qfi, ScalingAndShift) {
  sampling::Rng rng(104);
  const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 3, rng);
  const LocalHamiltonian h = LocalHamiltonian::from_bloch(sampling::random_unit_vector(rng));
  EXPECT_TRUE(qfi_scaling_check(rho, h, 3.0, -2.0));
  EXPECT_TRUE(qfi_scaling_check(rho, h, 0.5, 7.0));
}

TEST(Qfi, DimensionMismatch) {
  const LocalHamiltonian h3(qmat::identity(3));
  EXPECT_EQ(kind_of([&] { qfi(q_state(0.5), h3); }), ErrorKind::DimensionMismatch);
}

TEST(MMatrix, QuadraticFormReproducesQfi) {
  sampling::Rng rng(105);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 1 + t % 4, rng);
    const Eigen::Matrix3d m = m_matrix(rho).entries;
    const BlochVector n = sampling::random_unit_vector(rng);
    EXPECT_NEAR(n.dot(m * n), qfi(rho, LocalHamiltonian::from_bloch(n)) / 4.0, 1e-12);
  }
}

TEST(MMatrix, QFamilySpectrum) {
  for (double p : {0.2, 0.5, 0.9}) {
    const Eigen::Vector3d ev = sorted_eigenvalues(m_matrix(q_state(p)).entries);
    EXPECT_NEAR(ev(0), p * p, 1e-12);
    EXPECT_NEAR(ev(1), p * p, 1e-12);
    EXPECT_NEAR(ev(2), 2 * p * p / (1 + p * p), 1e-12);
  }
}

TEST(MMatrix, SeparableExampleSpectrum) {
  const Eigen::Vector3d ev = sorted_eigenvalues(m_matrix(probes::make_probe(probes::separable())).entries);
  EXPECT_NEAR(ev(0), 0.5, 1e-12);
  EXPECT_NEAR(ev(1), 0.5, 1e-12);
  EXPECT_NEAR(ev(2), 1.0, 1e-12);
}

TEST(MMatrix, RequiresQubitA) {
  const DensityMatrix rho(qmat::identity(6) / 6.0, {3, 2});
  EXPECT_EQ(kind_of([&] { m_matrix(rho); }), ErrorKind::SubsystemANotQubit);
  EXPECT_EQ(kind_of([&] { ip_closed_form(rho); }), ErrorKind::SubsystemANotQubit);
}

TEST(Ip, ProbeFamilies) {
  for (double p : {0.0, 0.13, 0.5, 0.8, 1.0}) {
    EXPECT_NEAR(ip_closed_form(q_state(p)), p * p, 1e-12);
    EXPECT_LE(ip_closed_form(c_state(p)), 1e-10);
  }
}

TEST(Ip, WernerFormula) {
  for (int i = 0; i <= 10; ++i) {
    const double f = i / 10.0;
    EXPECT_NEAR(ip_closed_form(probes::make_probe(probes::werner(f))), 2 * f * f / (1 + f), 1e-12);
  }
}

TEST(Ip, NamedStates) {
  EXPECT_NEAR(ip_closed_form(probes::make_probe(probes::separable())), 0.5, 1e-12);
  EXPECT_NEAR(ip_closed_form(probes::make_probe(probes::psi_bell())), 1.0, 1e-12);
  EXPECT_NEAR(ip_closed_form(DensityMatrix(qmat::identity(4) / 4.0, {2, 2})), 0.0, 1e-15);
}

TEST(Ip, BellDiagonalFrozenValues) {
  struct Case {
    double c1, c2, c3, ip;
  };
  const Case cases[] = {
      {0.5, 0.3, 0.1, 0.17333333333333},
      {0.2, -0.6, 0.3, 0.090625},
      {-0.4, -0.3, -0.2, 0.0976190476190476},
      {0.1, 0.1, -0.7, 0.0117647058823529},
  };
  for (const Case& c : cases) {
    EXPECT_NEAR(ip_bell_diagonal(c.c1, c.c2, c.c3), c.ip, 1e-12);
    EXPECT_NEAR(ip_closed_form(probes::make_probe(probes::bell_diagonal(c.c1, c.c2, c.c3))), c.ip,
                1e-12);
  }
}

TEST(Ip, BellDiagonalDegenerateDenominatorFallsBack) {
  // |Phi+>: c = (1, -1, 1), IP = 1.
  EXPECT_NEAR(ip_bell_diagonal(1.0, -1.0, 1.0), 1.0, 1e-9);
  EXPECT_EQ(kind_of([] { ip_bell_diagonal(1.0, 1.0, 1.0); }), ErrorKind::InvalidCorrelationTriple);
  EXPECT_EQ(kind_of([] { ip_bell_diagonal(1.5, 0.0, 0.0); }), ErrorKind::InvalidCorrelationTriple);
}

TEST(Ip, OracleBracketsClosedForm) {
  sampling::Rng rng(106);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 2 + t % 3, rng);
    const sphere::Minimum m = ip_oracle(rho);
    EXPECT_GE(m.value, ip_closed_form(rho) - 1e-12);
    EXPECT_LE(m.value - ip_closed_form(rho), 5e-4);
  }
  EXPECT_EQ(kind_of([] { ip_oracle(q_state(0.5), {32, 64, false}); }), ErrorKind::ParameterOutOfRange);
}

TEST(Ip, OracleArgminForClassicalProbe) {
  const sphere::Minimum m = ip_oracle(c_state(0.7));
  EXPECT_LE(m.value, 1e-4);
  EXPECT_NEAR(m.theta, kPi / 2.0, 0.02);
  EXPECT_NEAR(m.phi, 0.0, 1e-12);
}

TEST(Skew, MatchesDenmanBeaversOracle) {
  sampling::Rng rng(107);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 4, rng);
    const BlochVector n = sampling::random_unit_vector(rng);
    const double expected = oracle::skew_information(
        rho.matrix(), oracle::kron(oracle::n_sigma(n), Eigen::MatrixXcd::Identity(2, 2)));
    EXPECT_NEAR(skew_information(rho, LocalHamiltonian::from_bloch(n)), expected, 1e-10);
  }
}

TEST(Skew, FrozenValues) {
  EXPECT_NEAR(skew_information(q_state(0.5), LocalHamiltonian(qmat::pauli_x())),
              0.1339745962155613, 1e-13);
  const DensityMatrix bell = probes::make_probe(probes::werner(1.0));
  for (int axis = 0; axis < 3; ++axis) {
    EXPECT_NEAR(skew_information(bell, LocalHamiltonian(qmat::pauli(axis))), 1.0, 1e-12);
  }
}

TEST(Skew, QuadraticFormAndLqu) {
  sampling::Rng rng(108);
  const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 3, rng);
  const Eigen::Matrix3d w = skew_quadratic_form(rho);
  for (int t = 0; t < 10; ++t) {
    const BlochVector n = sampling::random_unit_vector(rng);
    EXPECT_NEAR(n.dot(w * n), skew_information(rho, LocalHamiltonian::from_bloch(n)), 1e-12);
  }
  const sphere::Minimum grid = lqu_oracle(rho, {64, 128, true});
  EXPECT_NEAR(grid.value, lqu(rho), 1e-8);
  EXPECT_LE(lqu(rho), ip_closed_form(rho) + 1e-10);
}

TEST(Sld, FrozenEigenvaluesForQProbe) {
  for (double p : {0.3, 0.6, 0.9}) {
    const SldDecomposition s = sld(q_state(p), probes::black_box_setting(3), kPi / 4.0);
    ASSERT_EQ(s.eigenvalues.size(), 4);
    EXPECT_NEAR(s.eigenvalues(0), -2 * p, 1e-10);
    EXPECT_NEAR(s.eigenvalues(1), -2 * p, 1e-10);
    EXPECT_NEAR(s.eigenvalues(2), 2 * p, 1e-10);
    EXPECT_NEAR(s.eigenvalues(3), 2 * p, 1e-10);
    EXPECT_NEAR(sld_second_moment(s), 4 * p * p, 1e-10);
    EXPECT_LE(sld_defect(s), kSldTolerance);
  }
}

TEST(Sld, RankDeficientStates) {
  sampling::Rng rng(109);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = sampling::random_mixed_state({2, 2}, 1 + t % 2, rng);
    const LocalHamiltonian h = LocalHamiltonian::from_bloch(sampling::random_unit_vector(rng));
    const SldDecomposition s = sld(rho, h, 0.4);
    EXPECT_LE(sld_defect(s), kSldTolerance);
    EXPECT_NEAR(sld_mean(s), 0.0, kSldTolerance);
    EXPECT_NEAR(sld_second_moment(s), qfi(rho, h), 1e-9);
  }
}

TEST(LocalVariance, PureStateMinimumEqualsIp) {
  sampling::Rng rng(110);
  const DensityMatrix rho = sampling::random_pure_state({2, 2}, rng);
  EXPECT_NEAR(min_local_variance(rho, {64, 128, true}).value, ip_closed_form(rho), 1e-8);
}
