#pragma once

// Seeded random ensembles used by the property suites.

#include "ipower/qmat.hpp"

#include <cstdint>
#include <random>

namespace ipower::sampling {

using Rng = std::mt19937_64;

// Independent generator for sub-run `index` of a root seed; results do not
// depend on the order in which sub-runs are drawn.
Rng split(std::uint64_t root_seed, std::uint64_t index);

// QR of a complex Ginibre matrix with the phases of diag(R) folded into Q.
qmat::ComplexMatrix haar_unitary(int dim, Rng& rng);
qmat::ComplexVector haar_pure_state(int dim, Rng& rng);

// Partial trace over an environment of dimension env_dim of a Haar-random
// pure state on (A (x) B) (x) E. Rank is at most env_dim.
qmat::DensityMatrix random_mixed_state(qmat::Dims dims, int env_dim, Rng& rng);
qmat::DensityMatrix random_pure_state(qmat::Dims dims, Rng& rng);

// sum_j s_j |j><j|_A (x) chi_{B,j} in a Haar-random local basis on A.
qmat::DensityMatrix random_classical_quantum_state(qmat::Dims dims, Rng& rng);

// Same spectrum as `rho`, but every degenerate eigenspace is re-mixed by a
// random unitary.
qmat::DensityMatrix remix_degenerate_eigenspaces(const qmat::DensityMatrix& rho, Rng& rng);

qmat::BlochVector random_unit_vector(Rng& rng);

}  // namespace ipower::sampling
