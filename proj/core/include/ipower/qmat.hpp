#pragma once

// Dense complex linear algebra and bipartite quantum-state primitives.
//
// States live on H_A (x) H_B with the A index major: basis index i*d_B + k
// for |i>_A |k>_B. Everything here is a value type; no function touches
// global state.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ipower::qmat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using BlochVector = Eigen::Vector3d;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kNorm = 1e-10;
inline constexpr double kPsd = 1e-9;
inline constexpr double kEigen = 1e-9;
inline constexpr double kOrthonormal = 1e-9;
inline constexpr double kReconstruction = 1e-9;
// Eigenvalues closer than this are treated as one degenerate cluster.
inline constexpr double kDegeneracyGap = 1e-8;
}  // namespace tol

inline constexpr int kMaxDimension = 64;

struct Dims {
  int a = 2;
  int b = 2;

  int total() const { return a * b; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

enum class Subsystem { A, B };

Subsystem parse_subsystem(std::string_view label);

// Eigenvectors are the columns of `vectors`, paired with ascending `values`.
struct EigenSystem {
  RealVector values;
  ComplexMatrix vectors;
};

void require_square_finite(const ComplexMatrix& m, std::string_view what);
double hermiticity_defect(const ComplexMatrix& m);

EigenSystem eig_hermitian(const ComplexMatrix& m);

ComplexMatrix identity(int dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
// Index 0, 1, 2 -> sigma_x, sigma_y, sigma_z.
ComplexMatrix pauli(int axis);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

// sum_i values_i |v_i><v_i|
ComplexMatrix from_spectrum(const RealVector& values, const ComplexMatrix& vectors);

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity, then caches the
  // spectral decomposition. Eigenvalues in [-tol::kPsd, 0) are clamped to
  // zero and the spectrum renormalized.
  DensityMatrix(const ComplexMatrix& matrix, Dims dims);

  // Builds the state from an explicit decomposition {q_i, |psi_i>}. The
  // supplied vectors are kept as-is, which lets callers pick any basis of a
  // degenerate eigenspace.
  static DensityMatrix from_spectrum(const RealVector& probabilities,
                                     const ComplexMatrix& vectors, Dims dims);
  static DensityMatrix pure(const ComplexVector& psi, Dims dims);

  const ComplexMatrix& matrix() const { return matrix_; }
  Dims dims() const { return dims_; }
  int dim() const { return dims_.total(); }
  const RealVector& probabilities() const { return probabilities_; }
  const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

  double purity() const;
  // rho^{1/2} from the cached spectrum.
  ComplexMatrix sqrt() const;

 private:
  DensityMatrix() = default;

  ComplexMatrix matrix_;
  Dims dims_;
  RealVector probabilities_;
  ComplexMatrix eigenvectors_;
};

// Hermitian generator acting on subsystem A.
class LocalHamiltonian {
 public:
  explicit LocalHamiltonian(const ComplexMatrix& matrix);

  // H = n . sigma for a unit vector n; requires | |n| - 1 | <= tol::kNorm.
  static LocalHamiltonian from_bloch(const BlochVector& n);
  // n = (sin t cos p, sin t sin p, cos t).
  static LocalHamiltonian from_angles(double theta, double phi);

  // a H + b 1. Drops the Bloch parameterization.
  LocalHamiltonian affine(double a, double b) const;

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  // Ordered spectrum class Gamma (ascending).
  const RealVector& spectrum() const { return eigen_.values; }
  const std::optional<BlochVector>& bloch_vector() const { return bloch_; }

  // exp(-i phi H), exact through the eigendecomposition.
  ComplexMatrix unitary(double phi) const;

 private:
  ComplexMatrix matrix_;
  EigenSystem eigen_;
  std::optional<BlochVector> bloch_;
};

BlochVector bloch_from_angles(double theta, double phi);

// H_A (x) 1_B
ComplexMatrix lift_to_a(const ComplexMatrix& h_a, int d_b);

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

// U rho U^dagger for a unitary on the full space; the spectrum is carried
// over without re-diagonalizing.
DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& unitary);

// (U_A (x) 1) rho (U_A (x) 1)^dagger with U_A = exp(-i phi H_A).
DensityMatrix evolve(const DensityMatrix& rho, const LocalHamiltonian& h, double phi);

// sum_k (1 (x) K_k) rho (1 (x) K_k)^dagger
DensityMatrix apply_channel_b(const DensityMatrix& rho, std::span<const ComplexMatrix> kraus_b);

std::vector<ComplexMatrix> depolarizing_kraus(double p);
std::vector<ComplexMatrix> amplitude_damping_kraus(double gamma);

double hs_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace ipower::qmat
