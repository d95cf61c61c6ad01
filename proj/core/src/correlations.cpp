#include "ipower/correlations.hpp"

#include "ipower/error.hpp"
#include "ipower/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ipower::correlations {

using qmat::Complex;

namespace {

void require_matching(const DensityMatrix& rho, const LocalHamiltonian& h) {
  if (h.dim() != rho.dims().a) {
    throw Error(ErrorKind::DimensionMismatch, "Hamiltonian dimension " + std::to_string(h.dim()) +
                                                  " does not match d_A = " +
                                                  std::to_string(rho.dims().a));
  }
}

void require_qubit_a(const DensityMatrix& rho) {
  if (rho.dims().a != 2) {
    throw Error(ErrorKind::SubsystemANotQubit,
                "subsystem A has dimension " + std::to_string(rho.dims().a) + ", expected 2");
  }
}

double pair_weight(double qi, double ql) {
  const double s = qi + ql;
  return s > kRankCutoff ? (qi - ql) * (qi - ql) / s : 0.0;
}

// <psi_i| X (x) 1 |psi_l> for all i, l.
ComplexMatrix eigenbasis_elements(const DensityMatrix& rho, const ComplexMatrix& h_a) {
  const ComplexMatrix& v = rho.eigenvectors();
  return v.adjoint() * qmat::lift_to_a(h_a, rho.dims().b) * v;
}

double smallest_eigenvalue(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "3x3 eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

void require_resolution(const sphere::Grid& grid) {
  if (grid.theta_points < kMinOracleResolution || grid.phi_points < kMinOracleResolution) {
    throw Error(ErrorKind::ParameterOutOfRange, "oracle grid needs at least 64 points per angle");
  }
}

}  // namespace

double qfi_from_elements(const RealVector& probabilities, const ComplexMatrix& elements) {
  const Eigen::Index n = probabilities.size();
  double f = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = i + 1; l < n; ++l) {
      const double w = pair_weight(probabilities(i), probabilities(l));
      if (w != 0.0) f += w * std::norm(elements(i, l));
    }
  }
  return 4.0 * f;
}

double qfi(const DensityMatrix& rho, const LocalHamiltonian& h) {
  require_matching(rho, h);
  return qfi_from_elements(rho.probabilities(), eigenbasis_elements(rho, h.matrix()));
}

QubitQfi::QubitQfi(const DensityMatrix& rho) {
  require_qubit_a(rho);
  const RealVector& q = rho.probabilities();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    for (Eigen::Index l = i + 1; l < q.size(); ++l) {
      const double w = pair_weight(q(i), q(l));
      if (w != 0.0) pairs_.push_back({i, l, w});
    }
  }
  for (int axis = 0; axis < 3; ++axis) {
    elements_[static_cast<std::size_t>(axis)] = eigenbasis_elements(rho, qmat::pauli(axis));
  }
}

double QubitQfi::operator()(const BlochVector& n) const {
  double f = 0.0;
  for (const Pair& p : pairs_) {
    const Complex g = n.x() * elements_[0](p.i, p.l) + n.y() * elements_[1](p.i, p.l) +
                      n.z() * elements_[2](p.i, p.l);
    f += p.weight * std::norm(g);
  }
  return 4.0 * f;
}

ComplexMatrix SldDecomposition::operator_matrix() const {
  return qmat::from_spectrum(eigenvalues, eigenbasis);
}

SldDecomposition sld(const DensityMatrix& rho, const LocalHamiltonian& h, double reference_phase) {
  require_matching(rho, h);
  const DensityMatrix shifted = qmat::evolve(rho, h, reference_phase);
  const RealVector& q = shifted.probabilities();
  const ComplexMatrix& v = shifted.eigenvectors();
  const ComplexMatrix g = eigenbasis_elements(shifted, h.matrix());

  // In the eigenbasis of rho^phi, d_phi rho^phi = -i [X, rho^phi] has
  // elements -i (q_j - q_i) g_ij, and L_ij = 2 (d rho)_ij / (q_i + q_j).
  // Kernel-kernel pairs are left at zero.
  const Eigen::Index n = q.size();
  ComplexMatrix l_eig = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = q(i) + q(j);
      if (s > kRankCutoff) {
        l_eig(i, j) = 2.0 * Complex(0.0, -1.0) * (q(j) - q(i)) * g(i, j) / s;
      }
    }
  }
  ComplexMatrix l_op = v * l_eig * v.adjoint();
  l_op = 0.5 * (l_op + l_op.adjoint());
  qmat::EigenSystem eig = qmat::eig_hermitian(l_op);

  return SldDecomposition{std::move(eig.values), std::move(eig.vectors), reference_phase, h,
                          shifted.matrix()};
}

double sld_defect(const SldDecomposition& s) {
  const ComplexMatrix& rho = s.rho_at_reference;
  const int db = static_cast<int>(rho.rows()) / s.setting.dim();
  const ComplexMatrix x = qmat::lift_to_a(s.setting.matrix(), db);
  const ComplexMatrix derivative = Complex(0.0, -1.0) * (x * rho - rho * x);
  const ComplexMatrix l = s.operator_matrix();
  return (derivative - 0.5 * (rho * l + l * rho)).norm();
}

double sld_mean(const SldDecomposition& s) {
  return (s.rho_at_reference * s.operator_matrix()).trace().real();
}

double sld_second_moment(const SldDecomposition& s) {
  const ComplexMatrix l = s.operator_matrix();
  return (s.rho_at_reference * l * l).trace().real();
}

double MMatrix::smallest_eigenvalue() const {
  return correlations::smallest_eigenvalue(entries);
}

MMatrix m_matrix(const DensityMatrix& rho) {
  require_qubit_a(rho);
  const RealVector& q = rho.probabilities();
  std::array<ComplexMatrix, 3> s;
  for (int axis = 0; axis < 3; ++axis) {
    s[static_cast<std::size_t>(axis)] = eigenbasis_elements(rho, qmat::pauli(axis));
  }
  // Full i, l double sum; the diagonal terms carry zero weight.
  MMatrix m;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        for (Eigen::Index l = 0; l < q.size(); ++l) {
          const double w = pair_weight(q(i), q(l));
          if (w != 0.0) acc += w * s[a](i, l) * s[b](l, i);
        }
      }
      m.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 0.5 * acc.real();
    }
  }
  m.entries = 0.5 * (m.entries + m.entries.transpose()).eval();
  return m;
}

double ip_closed_form(const DensityMatrix& rho) {
  return std::max(0.0, m_matrix(rho).smallest_eigenvalue());
}

sphere::Minimum ip_oracle(const DensityMatrix& rho, const sphere::Grid& grid) {
  require_resolution(grid);
  const QubitQfi f(rho);
  sphere::Minimum m = sphere::minimize([&f](const BlochVector& n) { return 0.25 * f(n); }, grid);
  if (m.phi >= std::numbers::pi) {
    m.argmin = -m.argmin;
    m.theta = std::numbers::pi - m.theta;
    m.phi -= std::numbers::pi;
  }
  return m;
}

double ip_bell_diagonal(double c1, double c2, double c3) {
  DensityMatrix rho = [&] {
    try {
      return probes::make_probe(probes::bell_diagonal(c1, c2, c3));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidCorrelationTriple, e.what());
    }
  }();
  const double hs2 = c1 * c1 + c2 * c2 + c3 * c3;
  const double op2 = std::max({c1 * c1, c2 * c2, c3 * c3});
  const double det = c1 * c2 * c3;
  const double denominator = 1.0 - op2;
  if (denominator < kDegenerateDenominator) return ip_closed_form(rho);
  return (hs2 - op2 + 2.0 * det) / denominator;
}

double skew_information(const DensityMatrix& rho, const LocalHamiltonian& h) {
  require_matching(rho, h);
  const ComplexMatrix root = rho.sqrt();
  const ComplexMatrix x = qmat::lift_to_a(h.matrix(), rho.dims().b);
  const ComplexMatrix k = root * x - x * root;
  return std::max(0.0, -0.5 * (k * k).trace().real());
}

Eigen::Matrix3d skew_quadratic_form(const DensityMatrix& rho) {
  require_qubit_a(rho);
  Eigen::Matrix3d w;
  for (int m = 0; m < 3; ++m) {
    w(m, m) = skew_information(rho, LocalHamiltonian::from_bloch(BlochVector::Unit(m)));
  }
  for (int m = 0; m < 3; ++m) {
    for (int n = m + 1; n < 3; ++n) {
      const BlochVector diagonal = (BlochVector::Unit(m) + BlochVector::Unit(n)).normalized();
      const double value = skew_information(rho, LocalHamiltonian::from_bloch(diagonal));
      w(m, n) = w(n, m) = value - 0.5 * (w(m, m) + w(n, n));
    }
  }
  return w;
}

double lqu(const DensityMatrix& rho) {
  return std::max(0.0, smallest_eigenvalue(skew_quadratic_form(rho)));
}

sphere::Minimum lqu_oracle(const DensityMatrix& rho, const sphere::Grid& grid) {
  require_qubit_a(rho);
  return sphere::minimize(
      [&rho](const BlochVector& n) {
        return skew_information(rho, LocalHamiltonian::from_bloch(n.normalized()));
      },
      grid);
}

double local_variance(const DensityMatrix& rho, const LocalHamiltonian& h) {
  require_matching(rho, h);
  const ComplexMatrix x = qmat::lift_to_a(h.matrix(), rho.dims().b);
  const double mean = (rho.matrix() * x).trace().real();
  const double second = (rho.matrix() * x * x).trace().real();
  return second - mean * mean;
}

sphere::Minimum min_local_variance(const DensityMatrix& rho, const sphere::Grid& grid) {
  require_qubit_a(rho);
  return sphere::minimize(
      [&rho](const BlochVector& n) {
        return local_variance(rho, LocalHamiltonian::from_bloch(n.normalized()));
      },
      grid);
}

bool qfi_scaling_check(const DensityMatrix& rho, const LocalHamiltonian& h, double a, double b) {
  const double base = qfi(rho, h);
  const double scaled = qfi(rho, h.affine(a, b));
  return std::abs(scaled - a * a * base) <= kClosedFormTolerance * std::max(1.0, a * a * base);
}

}  // namespace ipower::correlations
