#include "ipower/qmat.hpp"

#include "ipower/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace ipower::qmat {

namespace {

constexpr double kRebuildThreshold = 1e-13;

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool orthonormal_columns(const ComplexMatrix& v, double tolerance) {
  const ComplexMatrix gram = v.adjoint() * v;
  return (gram - ComplexMatrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() <= tolerance;
}

// Lexicographic key on eigenvector components rounded to 1e-9, used only to
// order vectors inside a degenerate cluster deterministically.
std::vector<std::tuple<long long, long long>> rounded_key(const ComplexVector& v) {
  std::vector<std::tuple<long long, long long>> key;
  key.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    key.emplace_back(std::llround(v(i).real() * 1e9), std::llround(v(i).imag() * 1e9));
  }
  return key;
}

ComplexMatrix pauli_matrix(Complex a00, Complex a01, Complex a10, Complex a11) {
  ComplexMatrix m(2, 2);
  m << a00, a01, a10, a11;
  return m;
}

}  // namespace

Subsystem parse_subsystem(std::string_view label) {
  if (label == "A" || label == "a") return Subsystem::A;
  if (label == "B" || label == "b") return Subsystem::B;
  throw Error(ErrorKind::BadSubsystemLabel, "expected A or B, got '" + std::string(label) + "'");
}

void require_square_finite(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::NotSquare, std::string(what) + " must be a non-empty square matrix");
  }
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::NonFinite, std::string(what) + " has a non-finite entry");
    }
  }
}

double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

EigenSystem eig_hermitian(const ComplexMatrix& m) {
  require_square_finite(m, "eig_hermitian input");
  const double scale = std::max(1.0, max_abs(m));
  if (hermiticity_defect(m) > tol::kHermitian * scale) {
    throw Error(ErrorKind::NonHermitian, "matrix is not Hermitian within tolerance");
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "Hermitian eigensolver did not converge");
  }

  const RealVector& values = solver.eigenvalues();
  const ComplexMatrix& vectors = solver.eigenvectors();
  const auto n = static_cast<std::size_t>(values.size());

  // Eigen already returns ascending values; only degenerate clusters need a
  // deterministic secondary order.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && values(order[end]) - values(order[end - 1]) < tol::kDegeneracyGap) ++end;
    if (end - begin > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                       order.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](Eigen::Index x, Eigen::Index y) {
                         return rounded_key(vectors.col(x)) < rounded_key(vectors.col(y));
                       });
    }
    begin = end;
  }

  EigenSystem out;
  out.values.resize(values.size());
  out.vectors.resize(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < n; ++k) {
    out.values(static_cast<Eigen::Index>(k)) = values(order[k]);
    out.vectors.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
  }
  return out;
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() { return pauli_matrix(0.0, 1.0, 1.0, 0.0); }
ComplexMatrix pauli_y() { return pauli_matrix(0.0, Complex(0, -1), Complex(0, 1), 0.0); }
ComplexMatrix pauli_z() { return pauli_matrix(1.0, 0.0, 0.0, -1.0); }

ComplexMatrix pauli(int axis) {
  switch (axis) {
    case 0: return pauli_x();
    case 1: return pauli_y();
    case 2: return pauli_z();
    default: throw Error(ErrorKind::ParameterOutOfRange, "Pauli axis must be 0, 1 or 2");
  }
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square_finite(a, "tensor lhs");
  require_square_finite(b, "tensor rhs");
  const Eigen::Index da = a.rows();
  const Eigen::Index db = b.rows();
  ComplexMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix from_spectrum(const RealVector& values, const ComplexMatrix& vectors) {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

DensityMatrix::DensityMatrix(const ComplexMatrix& matrix, Dims dims) : dims_(dims) {
  require_square_finite(matrix, "density matrix");
  if (dims.a < 1 || dims.b < 1 || dims.total() != matrix.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "dims " + std::to_string(dims.a) + "x" + std::to_string(dims.b) +
                    " do not match matrix size " + std::to_string(matrix.rows()));
  }
  if (dims.total() > kMaxDimension) {
    throw Error(ErrorKind::DimensionMismatch, "total dimension exceeds 64");
  }
  if (hermiticity_defect(matrix) > tol::kHermitian) {
    throw Error(ErrorKind::NonHermitian, "density matrix is not Hermitian");
  }
  const double trace = matrix.trace().real();
  if (std::abs(trace - 1.0) > tol::kTrace) {
    throw Error(ErrorKind::InvalidState, "trace is " + std::to_string(trace) + ", expected 1");
  }

  EigenSystem eig = eig_hermitian(matrix);
  if (eig.values(0) < -tol::kPsd) {
    throw Error(ErrorKind::NotPositiveSemidefinite,
                "smallest eigenvalue " + std::to_string(eig.values(0)) + " is negative");
  }
  // Negatives at roundoff level only touch the cached spectrum; larger ones
  // also rebuild the matrix. Symmetrizing is idempotent, so dump/parse
  // cycles reproduce the matrix bit for bit.
  const bool rebuild = eig.values(0) < -kRebuildThreshold;
  eig.values = eig.values.cwiseMax(0.0);
  probabilities_ = eig.values / eig.values.sum();
  eigenvectors_ = std::move(eig.vectors);
  matrix_ = rebuild ? qmat::from_spectrum(probabilities_, eigenvectors_)
                    : ComplexMatrix(0.5 * (matrix + matrix.adjoint()));
}

DensityMatrix DensityMatrix::from_spectrum(const RealVector& probabilities,
                                           const ComplexMatrix& vectors, Dims dims) {
  require_square_finite(vectors, "eigenvector matrix");
  if (dims.a < 1 || dims.b < 1 || dims.total() != vectors.rows() ||
      probabilities.size() != vectors.cols() || dims.total() > kMaxDimension) {
    throw Error(ErrorKind::DimensionMismatch, "spectrum does not match dims");
  }
  if (!orthonormal_columns(vectors, tol::kOrthonormal)) {
    throw Error(ErrorKind::InvalidState, "eigenvectors are not orthonormal");
  }
  if (probabilities.minCoeff() < -tol::kPsd) {
    throw Error(ErrorKind::NotPositiveSemidefinite, "negative probability in spectrum");
  }
  if (std::abs(probabilities.sum() - 1.0) > tol::kTrace) {
    throw Error(ErrorKind::InvalidState, "probabilities do not sum to 1");
  }
  DensityMatrix out;
  out.dims_ = dims;
  out.probabilities_ = probabilities.cwiseMax(0.0);
  out.probabilities_ /= out.probabilities_.sum();
  out.eigenvectors_ = vectors;
  out.matrix_ = qmat::from_spectrum(out.probabilities_, out.eigenvectors_);
  return out;
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi, Dims dims) {
  if (std::abs(psi.norm() - 1.0) > tol::kNorm) {
    throw Error(ErrorKind::InvalidState, "pure state vector is not normalized");
  }
  return DensityMatrix(psi * psi.adjoint(), dims);
}

double DensityMatrix::purity() const {
  return probabilities_.squaredNorm();
}

ComplexMatrix DensityMatrix::sqrt() const {
  return qmat::from_spectrum(probabilities_.cwiseSqrt(), eigenvectors_);
}

LocalHamiltonian::LocalHamiltonian(const ComplexMatrix& matrix) {
  require_square_finite(matrix, "Hamiltonian");
  eigen_ = eig_hermitian(matrix);
  matrix_ = 0.5 * (matrix + matrix.adjoint());
}

LocalHamiltonian LocalHamiltonian::from_bloch(const BlochVector& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > tol::kNorm) {
    throw Error(ErrorKind::ParameterOutOfRange, "Bloch vector must have unit norm");
  }
  ComplexMatrix m = n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z();
  LocalHamiltonian h(m);
  h.bloch_ = n;
  return h;
}

LocalHamiltonian LocalHamiltonian::from_angles(double theta, double phi) {
  return from_bloch(bloch_from_angles(theta, phi));
}

LocalHamiltonian LocalHamiltonian::affine(double a, double b) const {
  return LocalHamiltonian(a * matrix_ + b * identity(dim()));
}

ComplexMatrix LocalHamiltonian::unitary(double phi) const {
  ComplexVector phases(eigen_.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::polar(1.0, -phi * eigen_.values(i));
  }
  return eigen_.vectors * phases.asDiagonal() * eigen_.vectors.adjoint();
}

BlochVector bloch_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

ComplexMatrix lift_to_a(const ComplexMatrix& h_a, int d_b) {
  return tensor(h_a, identity(d_b));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  const int da = rho.dims().a;
  const int db = rho.dims().b;
  const ComplexMatrix& m = rho.matrix();
  switch (keep) {
    case Subsystem::A: {
      ComplexMatrix out = ComplexMatrix::Zero(da, da);
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
          for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
      return DensityMatrix(out, {da, 1});
    }
    case Subsystem::B: {
      ComplexMatrix out = ComplexMatrix::Zero(db, db);
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
          for (int i = 0; i < da; ++i) out(k, l) += m(i * db + k, i * db + l);
      return DensityMatrix(out, {db, 1});
    }
  }
  throw Error(ErrorKind::BadSubsystemLabel, "unknown subsystem");
}

DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& unitary) {
  require_square_finite(unitary, "unitary");
  if (unitary.rows() != rho.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "unitary size does not match state");
  }
  if (!orthonormal_columns(unitary, tol::kOrthonormal)) {
    throw Error(ErrorKind::InvalidState, "matrix is not unitary");
  }
  return DensityMatrix::from_spectrum(rho.probabilities(), unitary * rho.eigenvectors(), rho.dims());
}

DensityMatrix evolve(const DensityMatrix& rho, const LocalHamiltonian& h, double phi) {
  if (h.dim() != rho.dims().a) {
    throw Error(ErrorKind::DimensionMismatch, "Hamiltonian dimension does not match d_A");
  }
  return conjugate(rho, lift_to_a(h.unitary(phi), rho.dims().b));
}

DensityMatrix apply_channel_b(const DensityMatrix& rho, std::span<const ComplexMatrix> kraus_b) {
  const int db = rho.dims().b;
  ComplexMatrix completeness = ComplexMatrix::Zero(db, db);
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const ComplexMatrix& k : kraus_b) {
    if (k.rows() != db || k.cols() != db) {
      throw Error(ErrorKind::DimensionMismatch, "Kraus operator does not act on B");
    }
    completeness += k.adjoint() * k;
    const ComplexMatrix lifted = tensor(identity(rho.dims().a), k);
    out += lifted * rho.matrix() * lifted.adjoint();
  }
  if ((completeness - identity(db)).cwiseAbs().maxCoeff() > tol::kReconstruction) {
    throw Error(ErrorKind::InvalidState, "Kraus operators are not trace preserving");
  }
  return DensityMatrix(0.5 * (out + out.adjoint()), rho.dims());
}

std::vector<ComplexMatrix> depolarizing_kraus(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "depolarizing strength must lie in [0, 1]");
  }
  return {std::sqrt(1.0 - 0.75 * p) * identity(2), std::sqrt(p / 4.0) * pauli_x(),
          std::sqrt(p / 4.0) * pauli_y(), std::sqrt(p / 4.0) * pauli_z()};
}

std::vector<ComplexMatrix> amplitude_damping_kraus(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "damping rate must lie in [0, 1]");
  }
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return {k0, k1};
}

double hs_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) {
    throw Error(ErrorKind::DimensionMismatch, "states have different dims");
  }
  const double overlap = rho.matrix().cwiseProduct(sigma.matrix().transpose()).sum().real();
  const double pr = rho.matrix().squaredNorm();
  const double ps = sigma.matrix().squaredNorm();
  if (pr <= 0.0 || ps <= 0.0) {
    throw Error(ErrorKind::ZeroPurity, "Hilbert-Schmidt norm is zero");
  }
  return overlap / std::sqrt(pr * ps);
}

}  // namespace ipower::qmat
