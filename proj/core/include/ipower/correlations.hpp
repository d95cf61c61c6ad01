#pragma once

// Quantum Fisher information, the symmetric logarithmic derivative, and the
// interferometric power of bipartite states, together with the skew
// information / local quantum uncertainty pair that bounds it from below.
//
// All generators act on subsystem A as H_A (x) 1_B. The worst-case
// quantities minimize over H_A = n . sigma, |n| = 1, so they require
// d_A = 2 (SubsystemANotQubit otherwise).

#include "ipower/qmat.hpp"
#include "ipower/sphere.hpp"

#include <array>
#include <utility>
#include <vector>

namespace ipower::correlations {

using qmat::BlochVector;
using qmat::ComplexMatrix;
using qmat::DensityMatrix;
using qmat::LocalHamiltonian;
using qmat::RealVector;

// Pairs of eigenvalues with q_i + q_l at or below this are dropped from every
// spectral sum (QFI, M matrix, SLD).
inline constexpr double kRankCutoff = 1e-12;
inline constexpr double kSldTolerance = 1e-9;
inline constexpr double kClosedFormTolerance = 1e-9;
// Below this value of 1 - ||C||_inf^2 the Bell-diagonal formula is singular
// and the spectral route is used instead.
inline constexpr double kDegenerateDenominator = 1e-9;
inline constexpr int kMinOracleResolution = 64;

// F = 4 sum_{i<l, q_i+q_l > cutoff} (q_i - q_l)^2 / (q_i + q_l) |g_il|^2,
// where g_il = <psi_i| X |psi_l> are generator elements in the eigenbasis.
double qfi_from_elements(const RealVector& probabilities, const ComplexMatrix& elements);

double qfi(const DensityMatrix& rho, const LocalHamiltonian& h);

// QFI of one state for many qubit directions n: the Pauli matrix elements
// in the eigenbasis of rho are computed once.
class QubitQfi {
 public:
  explicit QubitQfi(const DensityMatrix& rho);

  double operator()(const BlochVector& n) const;

 private:
  struct Pair {
    Eigen::Index i;
    Eigen::Index l;
    double weight;
  };
  std::vector<Pair> pairs_;
  std::array<ComplexMatrix, 3> elements_;
};

struct SldDecomposition {
  RealVector eigenvalues;      // l_j, ascending
  ComplexMatrix eigenbasis;    // columns |lambda_j>
  double reference_phase = 0.0;
  LocalHamiltonian setting;
  ComplexMatrix rho_at_reference;  // rho^{phi_0}

  ComplexMatrix operator_matrix() const;
};

SldDecomposition sld(const DensityMatrix& rho, const LocalHamiltonian& h, double reference_phase);

// || d_phi rho^phi - (rho^phi L + L rho^phi)/2 ||_F at the reference phase.
double sld_defect(const SldDecomposition& sld);
// Tr[rho^phi L] and Tr[rho^phi L^2].
double sld_mean(const SldDecomposition& sld);
double sld_second_moment(const SldDecomposition& sld);

struct MMatrix {
  Eigen::Matrix3d entries = Eigen::Matrix3d::Zero();

  double smallest_eigenvalue() const;
};

MMatrix m_matrix(const DensityMatrix& rho);

// Smallest eigenvalue of the M matrix, i.e. (1/4) min_n F(rho; n . sigma).
double ip_closed_form(const DensityMatrix& rho);

// Grid minimization of F(rho; n . sigma)/4 over the Bloch sphere. Evaluates
// the QFI spectral formula at every grid direction and never forms M.
// F is even in n, so the argmin is reported with phi in [0, pi).
sphere::Minimum ip_oracle(const DensityMatrix& rho, const sphere::Grid& grid = {});

// (||C||_2^2 - ||C||_inf^2 + 2 det C) / (1 - ||C||_inf^2) for C = diag(c1, c2, c3).
double ip_bell_diagonal(double c1, double c2, double c3);

// -1/2 Tr[[rho^{1/2}, H (x) 1]^2]
double skew_information(const DensityMatrix& rho, const LocalHamiltonian& h);

// Symmetric W with skew_information(rho, n . sigma) = n^T W n, assembled by
// polarization from the three axes and three face diagonals.
Eigen::Matrix3d skew_quadratic_form(const DensityMatrix& rho);

double lqu(const DensityMatrix& rho);
sphere::Minimum lqu_oracle(const DensityMatrix& rho, const sphere::Grid& grid);

// <X^2> - <X>^2 for X = H (x) 1, computed from the matrix directly.
double local_variance(const DensityMatrix& rho, const LocalHamiltonian& h);
sphere::Minimum min_local_variance(const DensityMatrix& rho, const sphere::Grid& grid);

// |F(rho; aH + b1) - a^2 F(rho; H)| <= tol * max(1, a^2 F(rho; H))
bool qfi_scaling_check(const DensityMatrix& rho, const LocalHamiltonian& h, double a, double b);

}  // namespace ipower::correlations
