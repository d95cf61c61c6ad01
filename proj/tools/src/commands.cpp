#include "commands.hpp"

#include "csv.hpp"

#include "ipower/correlations.hpp"
#include "ipower/error.hpp"
#include "ipower/sampling.hpp"
#include "ipower/state_io.hpp"
#include "ipower/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

namespace ipower::cli {

namespace fs = std::filesystem;
using estimation::EstimationRun;

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t parse_seed(const std::string& text, const std::string& field) {
  std::uint64_t seed = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, seed);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(field, "'" + text + "' is not an unsigned 64-bit integer");
  }
  return seed;
}

std::uint64_t resolve_seed(const std::optional<std::string>& flag) {
  return flag ? parse_seed(*flag, "--seed") : default_seed();
}

struct ProbeArgs {
  std::string label = "Q";
  std::optional<double> p;
  std::vector<double> c;
};

void add_probe_options(CLI::App& cmd, ProbeArgs& args) {
  cmd.add_option("--probe", args.label, "Probe family: Q, C, werner, belldiag, sep, psibell")
      ->capture_default_str();
  cmd.add_option("--p", args.p, "Family parameter (p for Q/C, f for werner)");
  cmd.add_option("--c", args.c, "Bell-diagonal correlations c1,c2,c3")->delimiter(',');
}

probes::ProbeFamily build_probe(const ProbeArgs& args) {
  probes::Family family;
  try {
    family = probes::parse_family(args.label);
  } catch (const Error& e) {
    throw ConfigError("--probe", e.what());
  }
  probes::ProbeFamily probe{family, {}};
  std::string field = "--p";
  switch (family) {
    case probes::Family::Q:
    case probes::Family::C:
    case probes::Family::Werner:
      if (!args.p) throw ConfigError("--p", "required for probe " + args.label);
      probe.parameters = {*args.p};
      break;
    case probes::Family::BellDiagonal:
      field = "--c";
      if (args.c.size() != 3) throw ConfigError("--c", "expects exactly three values c1,c2,c3");
      probe.parameters = args.c;
      break;
    case probes::Family::Separable:
    case probes::Family::PsiBell:
      break;
  }
  try {
    probes::make_probe(probe);
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
  return probe;
}

void require_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (format == a) return;
  }
  throw ConfigError("--format", "unsupported format '" + format + "'");
}

std::string theory_or_nan(double f_theory, double nu) {
  return format_number(f_theory > estimation::kFlatThreshold ? 1.0 / (nu * f_theory)
                                                             : std::nan(""));
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("--out", "cannot write " + path.string());
  return out;
}

// ---- figure3 ----------------------------------------------------------

std::string series_name(const EstimationRun& run) {
  return std::string(probes::label(run.probe)) + std::to_string(run.setting);
}

void write_figure3_csv(const SweepConfig& config, const std::vector<EstimationRun>& runs,
                       std::vector<fs::path>& written) {
  {
    const fs::path path = config.out / "figure3_a.csv";
    auto file = open_output(path);
    CsvWriter csv(file, {"series", "p", "value", "theory"});
    for (const auto& run : runs) {
      csv.cell(series_name(run)).cell(run.p).cell(run.f_exp / 4.0)
          .cell(probes::predicted_qfi(run.probe, run.p, run.setting) / 4.0);
      csv.end_row();
    }
    // The p^2 line is the IP of the Q family, one row per p.
    const auto first_q = std::find_if(runs.begin(), runs.end(), [](const EstimationRun& r) {
      return r.probe == probes::Family::Q;
    });
    for (auto it = first_q; it != runs.end(); ++it) {
      if (it->probe != probes::Family::Q || it->setting != first_q->setting) continue;
      csv.cell("IP").cell(it->p).cell(it->ip).cell(it->p * it->p);
      csv.end_row();
    }
    written.push_back(path);
  }
  {
    const fs::path path = config.out / "figure3_b.csv";
    auto file = open_output(path);
    CsvWriter csv(file, {"series", "p", "var", "theory"});
    for (const auto& run : runs) {
      csv.cell(series_name(run)).cell(run.p).cell(run.phi_hat_var)
          .cell(theory_or_nan(probes::predicted_qfi(run.probe, run.p, run.setting), run.nu));
      csv.end_row();
    }
    written.push_back(path);
  }
  {
    const fs::path path = config.out / "figure3_c.csv";
    auto file = open_output(path);
    CsvWriter csv(file, {"series", "p", "phi_hat", "phi_true", "failed"});
    for (const auto& run : runs) {
      csv.cell(series_name(run)).cell(run.p).cell(run.phi_hat_mean).cell(run.phi_true)
          .cell(run.failed ? 1 : 0);
      csv.end_row();
    }
    written.push_back(path);
  }
  {
    const fs::path path = config.out / "sweep.csv";
    auto file = open_output(path);
    CsvWriter csv(file, {"s", "k", "p", "f_exp_over_4", "ip", "var", "nu_var_product", "phi_hat",
                         "failed"});
    for (const auto& run : runs) {
      csv.cell(probes::label(run.probe)).cell(run.setting).cell(run.p).cell(run.f_exp / 4.0)
          .cell(run.ip).cell(run.phi_hat_var).cell(run.nu_var_product()).cell(run.phi_hat_mean)
          .cell(run.failed ? 1 : 0);
      csv.end_row();
    }
    written.push_back(path);
  }
}

nlohmann::json config_json(const SweepConfig& config) {
  nlohmann::json doc = {
      {"probes", config.probes},     {"settings", config.settings},
      {"theta_start", config.theta_start}, {"theta_stop", config.theta_stop},
      {"theta_step", config.theta_step},   {"phi_true", config.phi_true},
      {"nu", config.nu},             {"noise", config.noise},
      {"seed", config.seed},
  };
  doc["p_steps"] = config.p_steps ? nlohmann::json(*config.p_steps) : nlohmann::json(nullptr);
  return doc;
}

// ---- ip ---------------------------------------------------------------

nlohmann::json ip_report(const qmat::DensityMatrix& rho, const sphere::Grid& grid) {
  const double ip = correlations::ip_closed_form(rho);
  const double u = correlations::lqu(rho);
  const sphere::Minimum oracle = correlations::ip_oracle(rho, grid);
  return {
      {"ip", ip},
      {"lqu", u},
      {"oracle", oracle.value},
      {"oracle_error_bound", oracle.error_bound},
      {"argmin_theta", oracle.theta},
      {"argmin_phi", oracle.phi},
      {"argmin", {oracle.argmin.x(), oracle.argmin.y(), oracle.argmin.z()}},
      {"hierarchy_ok", ip >= u - 1e-10},
  };
}

void print_ip_text(const nlohmann::json& r, std::ostream& out) {
  out << "ip " << format_number(r["ip"]) << '\n'
      << "lqu " << format_number(r["lqu"]) << '\n'
      << "oracle " << format_number(r["oracle"]) << " (bound "
      << format_number(r["oracle_error_bound"]) << ")\n"
      << "argmin theta=" << format_number(r["argmin_theta"])
      << " phi=" << format_number(r["argmin_phi"]) << " n=(" << format_number(r["argmin"][0])
      << ", " << format_number(r["argmin"][1]) << ", " << format_number(r["argmin"][2]) << ")\n"
      << "hierarchy ip >= lqu: " << (r["hierarchy_ok"].get<bool>() ? "ok" : "VIOLATED") << '\n';
}

// ---- estimate / adaptive ---------------------------------------------

void check_common(double nu, double noise, int setting) {
  if (!(nu >= 1.0)) throw ConfigError("--nu", "must be >= 1");
  if (!(noise >= 0.0)) throw ConfigError("--noise", "must be >= 0");
  if (setting < 1 || setting > 3) throw ConfigError("--setting", "must be 1, 2 or 3");
}

void print_run_text(const EstimationRun& run, std::ostream& out) {
  out << "probe " << probes::label(run.probe) << " setting " << run.setting << '\n'
      << "phi_true " << format_number(run.phi_true) << '\n'
      << "phi_hat " << format_number(run.phi_hat_mean) << '\n'
      << "f_exp " << format_number(run.f_exp) << " (theory " << format_number(run.qfi_theory)
      << ")\n"
      << "ip " << format_number(run.ip) << '\n'
      << "var " << format_number(run.phi_hat_var) << '\n'
      << "nu_var_product " << format_number(run.nu_var_product()) << '\n'
      << "failed " << (run.failed ? "yes" : "no") << '\n';
}

// ---- verify -----------------------------------------------------------

int print_verify(const std::vector<verify::PropertyResult>& results, std::ostream& out) {
  struct Tally {
    int properties = 0;
    int passed = 0;
    long trials = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Tally> tallies;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.family << '/' << r.name << " trials=" << r.trials
        << " failures=" << r.failures << " worst=" << format_number(r.worst);
    if (!r.note.empty()) out << "  " << r.note;
    out << '\n';
    if (!tallies.count(r.family)) order.push_back(r.family);
    Tally& t = tallies[r.family];
    ++t.properties;
    t.passed += r.passed() ? 1 : 0;
    t.trials += r.trials;
  }
  bool all = true;
  for (const auto& family : order) {
    const Tally& t = tallies[family];
    all &= t.passed == t.properties;
    out << (t.passed == t.properties ? "PASS " : "FAIL ") << family << ": " << t.passed << '/'
        << t.properties << " properties, " << t.trials << " trials\n";
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("IPOWER_SEED"); env != nullptr) {
    return parse_seed(env, "IPOWER_SEED");
  }
  return verify::kDefaultSeed;
}

void validate(const SweepConfig& config) {
  if (config.probes.empty()) throw ConfigError("--probe", "at least one probe is required");
  for (const auto& label : config.probes) {
    probes::Family family;
    try {
      family = probes::parse_family(label);
    } catch (const Error& e) {
      throw ConfigError("--probe", e.what());
    }
    if (family != probes::Family::Q && family != probes::Family::C) {
      throw ConfigError("--probe", "figure3 sweeps the Q and C families only, got '" + label + "'");
    }
  }
  if (config.settings.empty()) throw ConfigError("--setting", "at least one setting is required");
  for (int k : config.settings) {
    if (k < 1 || k > 3) throw ConfigError("--setting", "must be 1, 2 or 3");
  }
  if (!(config.theta_start >= 0.0 && config.theta_start <= 90.0)) {
    throw ConfigError("--theta-start", "must lie in [0, 90] degrees");
  }
  if (!(config.theta_stop >= config.theta_start && config.theta_stop <= 90.0)) {
    throw ConfigError("--theta-stop", "must lie in [theta-start, 90] degrees");
  }
  if (config.p_steps) {
    if (*config.p_steps < 1) throw ConfigError("--p-steps", "p-grid is empty; need at least 1 step");
  } else if (!(config.theta_step > 0.0)) {
    throw ConfigError("--theta-step", "must be > 0");
  }
  if (!std::isfinite(config.phi_true)) throw ConfigError("--phi-true", "must be finite");
  if (!(config.nu >= 1.0)) throw ConfigError("--nu", "must be >= 1");
  if (!(config.noise >= 0.0)) throw ConfigError("--noise", "must be >= 0");
  require_format(config.format, {"csv", "json"});
}

std::vector<double> p_grid(const SweepConfig& config) {
  std::vector<double> ps;
  if (config.p_steps) {
    const int n = *config.p_steps;
    for (int i = 0; i <= n; ++i) {
      const double theta =
          config.theta_start + (config.theta_stop - config.theta_start) * i / static_cast<double>(n);
      ps.push_back(std::cos(theta * kPi / 180.0));
    }
  } else {
    ps = probes::flip_angle_grid(config.theta_start, config.theta_stop, config.theta_step);
  }
  for (double& p : ps) p = std::clamp(p, 0.0, 1.0);
  return ps;
}

std::vector<EstimationRun> run_sweep(const SweepConfig& config) {
  validate(config);
  const std::vector<double> ps = p_grid(config);
  std::vector<EstimationRun> runs;
  for (const auto& label : config.probes) {
    const probes::Family family = probes::parse_family(label);
    for (int k : config.settings) {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        estimation::ExperimentConfig e;
        e.probe = {family, {ps[i]}};
        e.setting = k;
        e.phi_true = config.phi_true;
        e.nu = config.nu;
        if (config.noise > 0.0) {
          // The stream depends only on the grid point, not on loop order.
          const auto index = (static_cast<std::uint64_t>(family) * 4 + static_cast<std::uint64_t>(k)) *
                                 100000 + i;
          e.noise = {config.noise, sampling::split(config.seed, index)()};
        }
        runs.push_back(estimation::run_experiment(e));
      }
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const EstimationRun& a, const EstimationRun& b) {
    return std::tuple(static_cast<int>(a.probe), a.setting, a.p) <
           std::tuple(static_cast<int>(b.probe), b.setting, b.p);
  });
  return runs;
}

std::vector<fs::path> write_figure3(const SweepConfig& config, const std::vector<EstimationRun>& runs) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw ConfigError("--out", "cannot create " + config.out.string() + ": " + ec.message());
  std::vector<fs::path> written;
  if (config.format == "json") {
    nlohmann::json doc = {{"config", config_json(config)}, {"runs", nlohmann::json::array()}};
    for (const auto& run : runs) doc["runs"].push_back(estimation::to_json(run));
    const fs::path path = config.out / "figure3.json";
    auto file = open_output(path);
    file << doc.dump(2) << '\n';
    written.push_back(path);
  } else {
    write_figure3_csv(config, runs, written);
  }
  return written;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interferometric power, quantum Fisher information and black-box phase estimation"};
  app.name("ipower");
  app.require_subcommand(1);

  std::optional<std::string> seed_flag;

  // figure3
  SweepConfig sweep;
  auto* figure3 = app.add_subcommand("figure3", "Sweep Q/C probes over settings and flip angles");
  figure3->add_option("--probe", sweep.probes, "Probe labels")->delimiter(',')->capture_default_str();
  figure3->add_option("--setting", sweep.settings, "Black-box settings")->delimiter(',')
      ->capture_default_str();
  figure3->add_option("--theta-start", sweep.theta_start, "First flip angle (degrees)")
      ->capture_default_str();
  figure3->add_option("--theta-stop", sweep.theta_stop, "Last flip angle (degrees)")
      ->capture_default_str();
  figure3->add_option("--theta-step", sweep.theta_step, "Flip-angle step (degrees)")
      ->capture_default_str();
  figure3->add_option("--p-steps", sweep.p_steps, "Split the flip-angle range into N equal steps");
  figure3->add_option("--phi-true", sweep.phi_true, "Encoded phase")->capture_default_str();
  figure3->add_option("--nu", sweep.nu, "Ensemble size")->capture_default_str();
  figure3->add_option("--noise", sweep.noise, "Relative Gaussian noise on populations")
      ->capture_default_str();
  figure3->add_option("--seed", seed_flag, "Root seed (default: IPOWER_SEED or 12345)");
  figure3->add_option("--out", sweep.out, "Output directory")->capture_default_str();
  figure3->add_option("--format", sweep.format, "csv or json")->capture_default_str();

  // ip
  std::string state_file;
  std::string ip_format = "text";
  sphere::Grid ip_grid;
  auto* ip = app.add_subcommand("ip", "Interferometric power of a state file");
  ip->add_option("state", state_file, "State JSON file")->required();
  ip->add_option("--theta-points", ip_grid.theta_points, "Oracle polar resolution")
      ->capture_default_str();
  ip->add_option("--phi-points", ip_grid.phi_points, "Oracle azimuthal resolution")
      ->capture_default_str();
  ip->add_option("--format", ip_format, "text or json")->capture_default_str();

  // estimate
  ProbeArgs est_probe;
  int est_setting = 1;
  double est_phi = kPi / 4.0;
  double est_nu = estimation::kDefaultEnsembleSize;
  double est_noise = 0.0;
  std::optional<double> est_reference;
  std::string est_format = "json";
  auto* estimate = app.add_subcommand("estimate", "Single black-box estimation run");
  add_probe_options(*estimate, est_probe);
  estimate->add_option("--setting", est_setting, "Black-box setting 1, 2 or 3")->capture_default_str();
  estimate->add_option("--phi-true", est_phi, "Encoded phase")->capture_default_str();
  estimate->add_option("--nu", est_nu, "Ensemble size")->capture_default_str();
  estimate->add_option("--noise", est_noise, "Relative Gaussian noise on populations")
      ->capture_default_str();
  estimate->add_option("--reference-phase", est_reference, "Phase of the measurement SLD");
  estimate->add_option("--seed", seed_flag, "Noise seed (default: IPOWER_SEED or 12345)");
  estimate->add_option("--format", est_format, "json, csv or text")->capture_default_str();

  // adaptive
  ProbeArgs ad_probe;
  int ad_setting = 1;
  double ad_phi = kPi / 4.0;
  double ad_noise = 0.0;
  estimation::AdaptiveOptions ad_options;
  std::string ad_format = "text";
  auto* adaptive = app.add_subcommand("adaptive", "Iterative phase localization");
  add_probe_options(*adaptive, ad_probe);
  adaptive->add_option("--setting", ad_setting, "Black-box setting 1, 2 or 3")->capture_default_str();
  adaptive->add_option("--phi-true", ad_phi, "Encoded phase")->capture_default_str();
  adaptive->add_option("--noise", ad_noise, "Relative Gaussian noise on populations")
      ->capture_default_str();
  adaptive->add_option("--max-iterations", ad_options.max_iterations, "Iteration cap")
      ->capture_default_str();
  adaptive->add_option("--tolerance", ad_options.tolerance, "Convergence tolerance (rad)")
      ->capture_default_str();
  adaptive->add_option("--seed", seed_flag, "Noise seed (default: IPOWER_SEED or 12345)");
  adaptive->add_option("--format", ad_format, "text or json")->capture_default_str();

  // verify
  std::optional<int> verify_trials;
  auto* verify_cmd = app.add_subcommand("verify", "Run the seeded property suites");
  verify_cmd->add_option("--trials", verify_trials, "Trials for every randomized property");
  verify_cmd->add_option("--seed", seed_flag, "Root seed (default: IPOWER_SEED or 12345)");

  // probe
  ProbeArgs pr_probe;
  std::string pr_out;
  auto* probe = app.add_subcommand("probe", "Write a probe state as JSON");
  add_probe_options(*probe, pr_probe);
  probe->add_option("--out", pr_out, "Output file (default: stdout)");

  std::vector<const char*> argv{"ipower"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*figure3) {
      sweep.seed = resolve_seed(seed_flag);
      const auto runs = run_sweep(sweep);
      for (const auto& path : write_figure3(sweep, runs)) out << path.string() << '\n';
      return kExitOk;
    }

    if (*ip) {
      require_format(ip_format, {"text", "json"});
      if (ip_grid.theta_points < correlations::kMinOracleResolution) {
        throw ConfigError("--theta-points", "must be >= 64");
      }
      if (ip_grid.phi_points < correlations::kMinOracleResolution) {
        throw ConfigError("--phi-points", "must be >= 64");
      }
      const qmat::DensityMatrix rho = io::read_state_file(state_file);
      const nlohmann::json report = ip_report(rho, ip_grid);
      if (ip_format == "json") {
        out << report.dump(2) << '\n';
      } else {
        print_ip_text(report, out);
      }
      return kExitOk;
    }

    if (*estimate) {
      require_format(est_format, {"json", "csv", "text"});
      check_common(est_nu, est_noise, est_setting);
      estimation::ExperimentConfig config;
      config.probe = build_probe(est_probe);
      config.setting = est_setting;
      config.phi_true = est_phi;
      config.nu = est_nu;
      config.noise = {est_noise, resolve_seed(seed_flag)};
      config.reference_phase = est_reference;
      const EstimationRun result = estimation::run_experiment(config);
      if (est_format == "json") {
        nlohmann::json doc = estimation::to_json(result);
        doc["violations"] = estimation::invariant_violations(result);
        out << doc.dump(2) << '\n';
      } else if (est_format == "csv") {
        CsvWriter csv(out, {"s", "k", "p", "f_exp_over_4", "ip", "var", "nu_var_product", "phi_hat",
                            "failed"});
        csv.cell(probes::label(result.probe)).cell(result.setting).cell(result.p)
            .cell(result.f_exp / 4.0).cell(result.ip).cell(result.phi_hat_var)
            .cell(result.nu_var_product()).cell(result.phi_hat_mean).cell(result.failed ? 1 : 0);
        csv.end_row();
      } else {
        print_run_text(result, out);
      }
      return kExitOk;
    }

    if (*adaptive) {
      require_format(ad_format, {"text", "json"});
      check_common(1.0, ad_noise, ad_setting);
      if (ad_options.max_iterations < 1) throw ConfigError("--max-iterations", "must be >= 1");
      if (!(ad_options.tolerance > 0.0)) throw ConfigError("--tolerance", "must be > 0");
      const qmat::DensityMatrix rho = probes::make_probe(build_probe(ad_probe));
      ad_options.noise = {ad_noise, resolve_seed(seed_flag)};
      const auto result = estimation::adaptive_localize(rho, probes::black_box_setting(ad_setting),
                                                        ad_phi, ad_options);
      if (ad_format == "json") {
        out << nlohmann::json{{"trial_phases", result.trial_phases},
                              {"converged", result.converged},
                              {"converged_at", result.converged_at},
                              {"phi_true", ad_phi}}
                   .dump(2)
            << '\n';
      } else {
        for (std::size_t n = 0; n < result.trial_phases.size(); ++n) {
          out << "iteration " << n + 1 << " phi " << format_number(result.trial_phases[n])
              << " error " << format_number(std::abs(result.trial_phases[n] - ad_phi)) << '\n';
        }
        out << (result.converged ? "converged at iteration " + std::to_string(result.converged_at)
                                  : std::string("not converged"))
            << '\n';
      }
      return result.converged ? kExitOk : kExitFailure;
    }

    if (*verify_cmd) {
      verify::Options options;
      options.seed = resolve_seed(seed_flag);
      if (verify_trials) {
        if (*verify_trials < 1) throw ConfigError("--trials", "must be >= 1");
        options.trials = *verify_trials;
      }
      out << "seed " << options.seed << '\n';
      return print_verify(verify::run_all(options), out);
    }

    if (*probe) {
      const qmat::DensityMatrix rho = probes::make_probe(build_probe(pr_probe));
      if (pr_out.empty()) {
        out << io::state_to_json(rho).dump(2) << '\n';
      } else {
        io::write_state_file(rho, pr_out);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::SubsystemANotQubit ? kExitNotQubit : kExitConfig;
  }
  return kExitConfig;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace ipower::cli
