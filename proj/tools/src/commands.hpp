#pragma once

// The `ipower` command line. Everything is reachable through run() so tests
// can drive the tool in-process with captured streams.

#include "ipower/estimation.hpp"
#include "ipower/probes.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ipower::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNotQubit = 3;

// Invalid user input; `field` names the flag or variable at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// IPOWER_SEED if set, otherwise the built-in default.
std::uint64_t default_seed();

struct SweepConfig {
  std::vector<std::string> probes = {"Q", "C"};
  std::vector<int> settings = {1, 2, 3};
  double theta_start = 0.0;
  double theta_stop = 90.0;
  double theta_step = 2.5;
  // When set, the flip-angle range is split into this many equal steps
  // instead of using theta_step.
  std::optional<int> p_steps;
  double phi_true = std::numbers::pi / 4.0;
  double nu = estimation::kDefaultEnsembleSize;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  std::string format = "csv";
};

// Throws ConfigError.
void validate(const SweepConfig& config);
std::vector<double> p_grid(const SweepConfig& config);

// One run per (probe, setting, p), sorted by (probe, setting, p).
std::vector<estimation::EstimationRun> run_sweep(const SweepConfig& config);

// Writes figure3_a.csv, figure3_b.csv, figure3_c.csv and sweep.csv (or
// figure3.json) into config.out and returns the paths written.
std::vector<std::filesystem::path> write_figure3(const SweepConfig& config,
                                                 const std::vector<estimation::EstimationRun>& runs);

inline constexpr const char* kSweepHeader = "s,k,p,f_exp_over_4,ip,var,nu_var_product,phi_hat,failed";

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ipower::cli
