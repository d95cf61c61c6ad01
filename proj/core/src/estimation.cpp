#include "ipower/estimation.hpp"

#include "ipower/error.hpp"
#include "ipower/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ipower::estimation {

using qmat::ComplexMatrix;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_basis(const DensityMatrix& rho, const LocalHamiltonian& h,
                   const SldDecomposition& reference) {
  if (reference.eigenbasis.rows() != rho.dim() || reference.eigenbasis.cols() != rho.dim() ||
      reference.setting.dim() != h.dim() || h.dim() != rho.dims().a) {
    throw Error(ErrorKind::BasisMismatch, "SLD reference does not match the state or Hamiltonian");
  }
}

double sum_of_squares(const RealVector& model, const RealVector& measured) {
  return (model - measured).squaredNorm();
}

template <typename F>
double golden_section(const F& f, double a, double b, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

RealVector model_populations(const DensityMatrix& rho, const LocalHamiltonian& h, double phi,
                             const ComplexMatrix& basis) {
  const ComplexMatrix u = qmat::lift_to_a(h.unitary(phi), rho.dims().b);
  const ComplexMatrix evolved = u * rho.matrix() * u.adjoint();
  return (basis.adjoint() * evolved * basis).diagonal().real();
}

RealVector measure_populations(const DensityMatrix& rho, const LocalHamiltonian& h, double phi_true,
                               const SldDecomposition& reference, const NoiseSpec& noise) {
  require_basis(rho, h, reference);
  RealVector d = model_populations(rho, h, phi_true, reference.eigenbasis);
  if (noise.exact()) return d;
  if (!(noise.sigma > 0.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "noise sigma must be >= 0");
  }

  sampling::Rng rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    d(j) = std::clamp(d(j) + noise.sigma * d(j) * normal(rng), 0.0, 1.0);
  }
  const double total = d.sum();
  if (total <= 0.0) {
    d.setConstant(1.0 / static_cast<double>(d.size()));
  } else {
    d /= total;
  }
  return d;
}

LeastSquaresResult least_squares_estimate(const RealVector& measured, const DensityMatrix& rho,
                                          const LocalHamiltonian& h,
                                          const SldDecomposition& reference,
                                          const SearchSpec& search) {
  require_basis(rho, h, reference);
  if (measured.size() != rho.dim()) {
    throw Error(ErrorKind::BasisMismatch, "population count does not match the state dimension");
  }
  if (std::abs(measured.sum() - 1.0) > kProbabilityTolerance) {
    throw Error(ErrorKind::ParameterOutOfRange, "measured populations are not normalized");
  }
  if (!(search.upper > search.lower) || !(search.tolerance > 0.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "search interval must be non-empty");
  }

  const auto objective = [&](double phi) {
    return sum_of_squares(model_populations(rho, h, phi, reference.eigenbasis), measured);
  };

  std::vector<double> edges;
  edges.push_back(search.lower);
  for (double s : search.starts) {
    if (s > search.lower && s < search.upper) edges.push_back(s);
  }
  edges.push_back(search.upper);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  LeastSquaresResult best;
  best.residual = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  const auto consider = [&](double phi) {
    const double value = objective(phi);
    highest = std::max(highest, value);
    if (value < best.residual) {
      best.residual = value;
      best.phi_hat = phi;
    }
  };

  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    consider(golden_section(objective, edges[k], edges[k + 1], search.tolerance));
  }
  const int samples = std::max(search.flatness_samples, 2);
  for (int i = 0; i <= samples; ++i) {
    consider(search.lower + (search.upper - search.lower) * i / samples);
  }

  best.failed = highest - best.residual < kFlatThreshold;
  return best;
}

double reconstructed_qfi(const RealVector& populations, const RealVector& sld_eigenvalues) {
  if (populations.size() != sld_eigenvalues.size()) {
    throw Error(ErrorKind::BasisMismatch, "populations and SLD eigenvalues differ in length");
  }
  return (sld_eigenvalues.array().square() * populations.array()).sum();
}

double estimator_variance(const RealVector& populations, const RealVector& sld_eigenvalues,
                          double f_exp, double nu) {
  if (!(f_exp > kFlatThreshold)) {
    throw Error(ErrorKind::ZeroInformation, "reconstructed QFI is zero; no phase information");
  }
  if (!(nu >= 1.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "ensemble size must be >= 1");
  }
  const double second = reconstructed_qfi(populations, sld_eigenvalues);
  const double first = sld_eigenvalues.dot(populations);
  return (second - first * first) / (nu * f_exp * f_exp);
}

AdaptiveResult adaptive_localize(const DensityMatrix& rho, const LocalHamiltonian& h,
                                 double phi_true, const AdaptiveOptions& options) {
  if (correlations::qfi(rho, h) <= kFlatThreshold) {
    throw Error(ErrorKind::NotIdentifiable, "QFI vanishes for this state and setting");
  }
  if (options.max_iterations < 1) {
    throw Error(ErrorKind::ParameterOutOfRange, "max_iterations must be >= 1");
  }

  AdaptiveResult result;
  result.trial_phases.push_back(0.0);
  for (int n = 1; n <= options.max_iterations; ++n) {
    const double trial = result.trial_phases.back();
    if (std::abs(trial - phi_true) < options.tolerance) {
      result.converged = true;
      result.converged_at = n;
      break;
    }
    if (n == options.max_iterations) break;

    const SldDecomposition reference = correlations::sld(rho, h, trial);
    NoiseSpec noise = options.noise;
    if (!noise.exact()) noise.seed = sampling::split(options.noise.seed, static_cast<std::uint64_t>(n))();
    const RealVector d = measure_populations(rho, h, phi_true, reference, noise);
    result.trial_phases.push_back(least_squares_estimate(d, rho, h, reference, options.search).phi_hat);
  }
  return result;
}

EstimationRun run_experiment(const ExperimentConfig& config) {
  const DensityMatrix rho = probes::make_probe(config.probe);
  const LocalHamiltonian h = probes::black_box_setting(config.setting);
  if (!(config.nu >= 1.0)) {
    throw Error(ErrorKind::ParameterOutOfRange, "ensemble size must be >= 1");
  }

  EstimationRun run;
  run.probe = config.probe.family;
  run.parameters = config.probe.parameters;
  const bool scalar_family = run.probe == probes::Family::Q || run.probe == probes::Family::C ||
                             run.probe == probes::Family::Werner;
  run.p = scalar_family ? config.probe.parameters.at(0) : kNaN;
  run.setting = config.setting;
  run.phi_true = config.phi_true;
  run.reference_phase = config.reference_phase.value_or(config.phi_true);
  run.nu = config.nu;
  run.noise_sigma = config.noise.sigma;
  run.seed = config.noise.seed;

  const SldDecomposition reference = correlations::sld(rho, h, run.reference_phase);
  const RealVector d = measure_populations(rho, h, config.phi_true, reference, config.noise);
  const LeastSquaresResult fit = least_squares_estimate(d, rho, h, reference, config.search);

  run.d_meas.assign(d.data(), d.data() + d.size());
  run.l_values.assign(reference.eigenvalues.data(),
                      reference.eigenvalues.data() + reference.eigenvalues.size());
  run.phi_hat_mean = fit.phi_hat;
  run.residual = fit.residual;
  run.f_exp = reconstructed_qfi(d, reference.eigenvalues);
  run.qfi_theory = correlations::qfi(rho, h);
  run.ip = correlations::ip_closed_form(rho);
  run.failed = fit.failed || run.f_exp <= kFlatThreshold;
  run.phi_hat_var = run.f_exp > kFlatThreshold
                        ? estimator_variance(d, reference.eigenvalues, run.f_exp, run.nu)
                        : kNaN;
  return run;
}

std::vector<std::string> invariant_violations(const EstimationRun& run) {
  std::vector<std::string> out;
  double total = 0.0;
  for (double d : run.d_meas) {
    total += d;
    if (d < -kProbabilityTolerance || d > 1.0 + kProbabilityTolerance) {
      out.push_back("population outside [0, 1]");
    }
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) out.push_back("populations do not sum to 1");

  double f = 0.0;
  for (std::size_t j = 0; j < run.d_meas.size() && j < run.l_values.size(); ++j) {
    f += run.l_values[j] * run.l_values[j] * run.d_meas[j];
  }
  if (std::abs(f - run.f_exp) > correlations::kClosedFormTolerance) {
    out.push_back("f_exp does not match sum l_j^2 d_j");
  }
  if (!run.failed) {
    const double band = run.noise_sigma == 0.0 ? kCramerRaoBandExact : kCramerRaoBandNoisy;
    const double product = run.cramer_rao_product();
    if (!(std::abs(product - 1.0) <= band)) {
      out.push_back("Cramer-Rao product " + std::to_string(product) + " outside band");
    }
  }
  return out;
}

nlohmann::json to_json(const EstimationRun& run) {
  return {
      {"probe", std::string(probes::label(run.probe))},
      {"parameters", run.parameters},
      {"p", number_or_null(run.p)},
      {"setting", run.setting},
      {"phi_true", run.phi_true},
      {"reference_phase", run.reference_phase},
      {"nu", run.nu},
      {"noise_sigma", run.noise_sigma},
      {"seed", run.seed},
      {"d_meas", run.d_meas},
      {"l_values", run.l_values},
      {"phi_hat_mean", run.phi_hat_mean},
      {"residual", run.residual},
      {"phi_hat_var", number_or_null(run.phi_hat_var)},
      {"nu_var_product", number_or_null(run.nu_var_product())},
      {"f_exp", run.f_exp},
      {"qfi_theory", run.qfi_theory},
      {"ip", run.ip},
      {"failed", run.failed},
  };
}

}  // namespace ipower::estimation
