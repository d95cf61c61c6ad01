#pragma once

// Black-box phase estimation, simulated at the level of ensemble averages:
// encode phi on subsystem A, project onto the SLD eigenbasis at a reference
// phase, fit the phase by least squares and reconstruct the estimator's
// variance and the QFI from the measured populations.

#include "ipower/correlations.hpp"
#include "ipower/probes.hpp"
#include "ipower/qmat.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ipower::estimation {

using correlations::SldDecomposition;
using qmat::DensityMatrix;
using qmat::LocalHamiltonian;
using qmat::RealVector;

// QFI and least-squares ranges at or below this mean "no information".
inline constexpr double kFlatThreshold = 1e-10;
inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kCramerRaoBandExact = 1e-6;
inline constexpr double kCramerRaoBandNoisy = 0.1;
inline constexpr double kDefaultEnsembleSize = 1e15;
inline constexpr double kDefaultNoise = 0.05;
inline constexpr double kAdaptiveTolerance = 1e-6;

// sigma == 0 is exact mode. Otherwise each population gets an independent
// Gaussian kick of standard deviation sigma * d_j before clamping to [0, 1]
// and renormalizing; the generator is seeded from `seed`.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;

  bool exact() const { return sigma == 0.0; }
};

// d_j(phi) = <lambda_j| rho^phi |lambda_j> for the columns of `basis`.
RealVector model_populations(const DensityMatrix& rho, const LocalHamiltonian& h, double phi,
                             const qmat::ComplexMatrix& basis);

RealVector measure_populations(const DensityMatrix& rho, const LocalHamiltonian& h, double phi_true,
                               const SldDecomposition& reference, const NoiseSpec& noise = {});

struct SearchSpec {
  double lower = 0.0;
  double upper = std::numbers::pi / 2.0;
  double tolerance = 1e-9;
  // Bracket boundaries for the multi-start golden-section search.
  std::vector<double> starts = {0.0, std::numbers::pi / 8.0, std::numbers::pi / 4.0,
                                3.0 * std::numbers::pi / 8.0};
  // Uniform samples used to decide whether the objective is flat.
  int flatness_samples = 64;
};

struct LeastSquaresResult {
  double phi_hat = 0.0;
  double residual = 0.0;
  // Objective range over the search interval below kFlatThreshold.
  bool failed = false;
};

LeastSquaresResult least_squares_estimate(const RealVector& measured, const DensityMatrix& rho,
                                          const LocalHamiltonian& h,
                                          const SldDecomposition& reference,
                                          const SearchSpec& search = {});

// sum_j l_j^2 d_j
double reconstructed_qfi(const RealVector& populations, const RealVector& sld_eigenvalues);

// [sum l^2 d - (sum l d)^2] / (nu F_exp^2); ZeroInformation if
// f_exp <= kFlatThreshold.
double estimator_variance(const RealVector& populations, const RealVector& sld_eigenvalues,
                          double f_exp, double nu);

struct AdaptiveOptions {
  int max_iterations = 5;
  double tolerance = kAdaptiveTolerance;
  NoiseSpec noise;
  SearchSpec search;
};

struct AdaptiveResult {
  // trial_phases[0] is the starting guess 0.
  std::vector<double> trial_phases;
  bool converged = false;
  // 1-based index n of the first trial within tolerance, 0 if none.
  int converged_at = 0;
};

// Throws NotIdentifiable when qfi(rho, h) <= kFlatThreshold.
AdaptiveResult adaptive_localize(const DensityMatrix& rho, const LocalHamiltonian& h,
                                 double phi_true, const AdaptiveOptions& options = {});

struct ExperimentConfig {
  probes::ProbeFamily probe;
  int setting = 1;
  double phi_true = std::numbers::pi / 4.0;
  double nu = kDefaultEnsembleSize;
  NoiseSpec noise;
  // Phase at which the measurement SLD is built; defaults to phi_true.
  std::optional<double> reference_phase;
  SearchSpec search;
};

struct EstimationRun {
  probes::Family probe = probes::Family::Q;
  std::vector<double> parameters;
  double p = 0.0;  // first parameter of Q / C / Werner, NaN otherwise
  int setting = 1;
  double phi_true = 0.0;
  double reference_phase = 0.0;
  double nu = kDefaultEnsembleSize;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> d_meas;
  std::vector<double> l_values;
  double phi_hat_mean = 0.0;
  double residual = 0.0;
  double phi_hat_var = 0.0;  // NaN when no information was recovered
  double f_exp = 0.0;
  double qfi_theory = 0.0;
  double ip = 0.0;
  bool failed = false;

  double nu_var_product() const { return nu * phi_hat_var; }
  double cramer_rao_product() const { return nu * phi_hat_var * f_exp; }
};

EstimationRun run_experiment(const ExperimentConfig& config);

// Empty when the run satisfies its record invariants (normalization,
// F_exp reconstruction, Cramer-Rao band for non-failed runs).
std::vector<std::string> invariant_violations(const EstimationRun& run);

nlohmann::json to_json(const EstimationRun& run);

}  // namespace ipower::estimation
