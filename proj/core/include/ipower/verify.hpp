#pragma once

// Seeded property suites over random ensembles. Each property reports how
// many trials it ran, how many violated the property, and the worst
// deviation it saw. `ipower verify` runs all of them.

#include "ipower/sphere.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipower::verify {

inline constexpr std::uint64_t kDefaultSeed = 12345;

struct Options {
  std::uint64_t seed = kDefaultSeed;
  // 0 keeps each property's own default ensemble size; otherwise every
  // property runs exactly this many trials.
  int trials = 0;
  sphere::Grid oracle_grid{256, 512, false};
};

struct PropertyResult {
  std::string family;
  std::string name;
  int trials = 0;
  int failures = 0;
  // Largest observed deviation from the property (units are per property).
  double worst = 0.0;
  std::string note;

  bool passed() const { return failures == 0; }
};

using PropertyFn = PropertyResult (*)(const Options&);

struct Property {
  std::string_view family;
  std::string_view name;
  PropertyFn run;
};

// qmat
PropertyResult eig_round_trip(const Options& options);
PropertyResult partial_trace_factorizes(const Options& options);
PropertyResult evolve_preserves_spectrum(const Options& options);
PropertyResult hs_fidelity_symmetric(const Options& options);

// correlations
PropertyResult oracle_equivalence(const Options& options);
PropertyResult faithfulness(const Options& options);
PropertyResult local_unitary_invariance(const Options& options);
PropertyResult b_channel_monotonicity(const Options& options);
PropertyResult pure_state_reduction(const Options& options);
PropertyResult hierarchy(const Options& options);
PropertyResult sld_defining_equation(const Options& options);
PropertyResult m_matrix_basis_independence(const Options& options);
PropertyResult qfi_additive_identity(const Options& options);

// probes
PropertyResult probe_predictions(const Options& options);
PropertyResult setting_landscape(const Options& options);

// estimation
PropertyResult guaranteed_precision(const Options& options);
PropertyResult cramer_rao_exact(const Options& options);
PropertyResult unbiased_exact(const Options& options);
PropertyResult noise_robustness(const Options& options);
PropertyResult adaptive_convergence(const Options& options);

std::span<const Property> all_properties();

std::vector<PropertyResult> run_all(const Options& options);

}  // namespace ipower::verify
