#include "ipower/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ipower::sampling {

using qmat::Complex;
using qmat::ComplexMatrix;
using qmat::ComplexVector;
using qmat::DensityMatrix;

namespace {

ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

}  // namespace

Rng split(std::uint64_t root_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

ComplexMatrix haar_unitary(int dim, Rng& rng) {
  const ComplexMatrix z = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0);
  }
  return q;
}

ComplexVector haar_pure_state(int dim, Rng& rng) {
  ComplexVector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

DensityMatrix random_mixed_state(qmat::Dims dims, int env_dim, Rng& rng) {
  const int n = dims.total();
  // Column e of `psi` is the (unnormalized) system component paired with
  // environment basis state e; rho = psi psi^dagger.
  ComplexMatrix psi = ginibre(n, env_dim, rng);
  psi /= psi.norm();
  ComplexMatrix rho = psi * psi.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return DensityMatrix(rho, dims);
}

DensityMatrix random_pure_state(qmat::Dims dims, Rng& rng) {
  return DensityMatrix::pure(haar_pure_state(dims.total(), rng), dims);
}

DensityMatrix random_classical_quantum_state(qmat::Dims dims, Rng& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::uniform_int_distribution<int> env(1, dims.b);
  std::vector<double> weights(static_cast<std::size_t>(dims.a));
  double total = 0.0;
  for (double& w : weights) total += (w = gamma(rng));

  const ComplexMatrix basis = haar_unitary(dims.a, rng);
  ComplexMatrix rho = ComplexMatrix::Zero(dims.total(), dims.total());
  for (int j = 0; j < dims.a; ++j) {
    const DensityMatrix chi = random_mixed_state({dims.b, 1}, env(rng), rng);
    const ComplexMatrix proj = basis.col(j) * basis.col(j).adjoint();
    rho += (weights[static_cast<std::size_t>(j)] / total) * qmat::tensor(proj, chi.matrix());
  }
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return DensityMatrix(rho, dims);
}

DensityMatrix remix_degenerate_eigenspaces(const DensityMatrix& rho, Rng& rng) {
  const qmat::RealVector& q = rho.probabilities();
  ComplexMatrix vectors = rho.eigenvectors();
  const int n = static_cast<int>(q.size());
  int begin = 0;
  while (begin < n) {
    int end = begin + 1;
    while (end < n && std::abs(q(end) - q(end - 1)) < qmat::tol::kDegeneracyGap) ++end;
    const int size = end - begin;
    if (size > 1) {
      vectors.middleCols(begin, size) = vectors.middleCols(begin, size) * haar_unitary(size, rng);
    }
    begin = end;
  }
  // Random global phase per eigenvector on top of the rotation.
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < n; ++k) vectors.col(k) *= std::polar(1.0, angle(rng));
  return DensityMatrix::from_spectrum(q, vectors, rho.dims());
}

qmat::BlochVector random_unit_vector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  qmat::BlochVector v;
  do {
    v = {normal(rng), normal(rng), normal(rng)};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace ipower::sampling
