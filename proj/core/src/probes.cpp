#include "ipower/probes.hpp"

#include "ipower/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ipower::probes {

using qmat::Complex;
using qmat::ComplexMatrix;
using qmat::DensityMatrix;

namespace {

void require_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::ParameterOutOfRange,
                std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

void require_count(const ProbeFamily& probe, std::size_t n) {
  if (probe.parameters.size() != n) {
    throw Error(ErrorKind::ParameterOutOfRange,
                std::string(label(probe.family)) + " takes " + std::to_string(n) + " parameter(s)");
  }
}

ComplexMatrix q_matrix(double p) {
  const double p2 = p * p;
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0 + p2;
  m(1, 1) = m(2, 2) = 1.0 - p2;
  m(0, 3) = m(3, 0) = 2.0 * p;
  return 0.25 * m;
}

ComplexMatrix c_matrix(double p) {
  const double p2 = p * p;
  Eigen::Matrix4d m;
  m << 1, p2, p, p,
       p2, 1, p, p,
       p, p, 1, p2,
       p, p, p2, 1;
  return 0.25 * m.cast<Complex>();
}

ComplexMatrix bell_projector(int which) {
  // which = 0: Phi+, 1: Psi-
  qmat::ComplexVector v = qmat::ComplexVector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  if (which == 0) {
    v(0) = s;
    v(3) = s;
  } else {
    v(1) = s;
    v(2) = -s;
  }
  return v * v.adjoint();
}

}  // namespace

Family parse_family(std::string_view label) {
  if (label == "Q" || label == "q") return Family::Q;
  if (label == "C" || label == "c") return Family::C;
  if (label == "werner") return Family::Werner;
  if (label == "belldiag") return Family::BellDiagonal;
  if (label == "sep") return Family::Separable;
  if (label == "psibell") return Family::PsiBell;
  throw Error(ErrorKind::ParameterOutOfRange, "unknown probe family '" + std::string(label) + "'");
}

std::string_view label(Family family) {
  switch (family) {
    case Family::Q: return "Q";
    case Family::C: return "C";
    case Family::Werner: return "werner";
    case Family::BellDiagonal: return "belldiag";
    case Family::Separable: return "sep";
    case Family::PsiBell: return "psibell";
  }
  return "?";
}

ProbeFamily q_probe(double p) { return {Family::Q, {p}}; }
ProbeFamily c_probe(double p) { return {Family::C, {p}}; }
ProbeFamily werner(double f) { return {Family::Werner, {f}}; }
ProbeFamily bell_diagonal(double c1, double c2, double c3) {
  return {Family::BellDiagonal, {c1, c2, c3}};
}
ProbeFamily separable() { return {Family::Separable, {}}; }
ProbeFamily psi_bell() { return {Family::PsiBell, {}}; }

DensityMatrix make_probe(const ProbeFamily& probe) {
  const qmat::Dims two_qubits{2, 2};
  switch (probe.family) {
    case Family::Q:
      require_count(probe, 1);
      require_unit_interval(probe.parameters[0], "p");
      return DensityMatrix(q_matrix(probe.parameters[0]), two_qubits);
    case Family::C:
      require_count(probe, 1);
      require_unit_interval(probe.parameters[0], "p");
      return DensityMatrix(c_matrix(probe.parameters[0]), two_qubits);
    case Family::Werner: {
      require_count(probe, 1);
      const double f = probe.parameters[0];
      require_unit_interval(f, "f");
      return DensityMatrix(f * bell_projector(0) + 0.25 * (1.0 - f) * qmat::identity(4), two_qubits);
    }
    case Family::BellDiagonal: {
      require_count(probe, 3);
      ComplexMatrix m = qmat::identity(4);
      for (int axis = 0; axis < 3; ++axis) {
        const double c = probe.parameters[static_cast<std::size_t>(axis)];
        if (!std::isfinite(c) || std::abs(c) > 1.0) {
          throw Error(ErrorKind::ParameterOutOfRange, "correlation coefficients must lie in [-1, 1]");
        }
        m += c * qmat::tensor(qmat::pauli(axis), qmat::pauli(axis));
      }
      return DensityMatrix(0.25 * m, two_qubits);
    }
    case Family::Separable: {
      require_count(probe, 0);
      ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
      zero(0, 0) = 1.0;
      ComplexMatrix one = ComplexMatrix::Zero(2, 2);
      one(1, 1) = 1.0;
      const ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
      return DensityMatrix(0.5 * (qmat::tensor(zero, zero) + qmat::tensor(plus, one)), two_qubits);
    }
    case Family::PsiBell:
      require_count(probe, 0);
      return DensityMatrix(bell_projector(1), two_qubits);
  }
  throw Error(ErrorKind::ParameterOutOfRange, "unknown probe family");
}

double predicted_qfi(Family family, double p, int setting) {
  if (setting < 1 || setting > 3) {
    throw Error(ErrorKind::BadSetting, "setting must be 1, 2 or 3");
  }
  if (family != Family::Q && family != Family::C) {
    throw Error(ErrorKind::ParameterOutOfRange, "analytic QFI is tabulated for Q and C only");
  }
  require_unit_interval(p, "p");
  const double p2 = p * p;
  switch (setting) {
    case 1: return 8.0 * p2 / (1.0 + p2);
    case 2: return family == Family::Q ? 4.0 * p2 : 4.0 * p2 / (1.0 + p2);
    default: return family == Family::Q ? 4.0 * p2 : 0.0;
  }
}

qmat::BlochVector setting_direction(int setting) {
  switch (setting) {
    case 1: return {0.0, 0.0, 1.0};
    case 2: return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0};
    case 3: return {1.0, 0.0, 0.0};
    default: throw Error(ErrorKind::BadSetting, "setting must be 1, 2 or 3");
  }
}

qmat::LocalHamiltonian black_box_setting(int setting) {
  return qmat::LocalHamiltonian::from_bloch(setting_direction(setting));
}

std::vector<double> flip_angle_grid(double start_deg, double stop_deg, double step_deg) {
  if (!(step_deg > 0.0) || !(stop_deg >= start_deg)) {
    throw Error(ErrorKind::ParameterOutOfRange, "flip-angle grid needs step > 0 and stop >= start");
  }
  const auto count = static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> ps;
  ps.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double theta = (start_deg + i * step_deg) * std::numbers::pi / 180.0;
    ps.push_back(std::cos(theta));
  }
  return ps;
}

}  // namespace ipower::probes
