#include "commands.hpp"
#include "csv.hpp"

#include "ipower/probes.hpp"
#include "ipower/state_io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace fs = std::filesystem;
using ipower::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ipower_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

int count_lines(const fs::path& path) {
  std::ifstream in(path);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST(CliFormat, TwelveSignificantDigits) {
  EXPECT_EQ(ipower::cli::format_number(0.1), "0.1");
  EXPECT_EQ(ipower::cli::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(ipower::cli::format_number(6.25e-16), "6.25e-16");
  EXPECT_EQ(ipower::cli::format_number(-0.0), "0");
  EXPECT_EQ(ipower::cli::format_number(std::nan("")), "nan");
}

TEST(CliFigure3, DefaultWritesAllDatasets) {
  const fs::path dir = scratch("default");
  const Result r = invoke({"figure3", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(dir / "sweep.csv"), ipower::cli::kSweepHeader);
  EXPECT_EQ(first_line(dir / "figure3_a.csv"), "series,p,value,theory");
  EXPECT_EQ(count_lines(dir / "sweep.csv"), 1 + 2 * 3 * 37);
  EXPECT_EQ(count_lines(dir / "figure3_a.csv"), 1 + 2 * 3 * 37 + 37);
  EXPECT_EQ(count_lines(dir / "figure3_b.csv"), 1 + 2 * 3 * 37);
  EXPECT_EQ(count_lines(dir / "figure3_c.csv"), 1 + 2 * 3 * 37);

  // Seven series in (a): six QFI curves and the IP line.
  std::ifstream in(dir / "figure3_a.csv");
  std::string line;
  std::getline(in, line);
  std::set<std::string> series;
  while (std::getline(in, line)) series.insert(line.substr(0, line.find(',')));
  EXPECT_EQ(series, (std::set<std::string>{"Q1", "Q2", "Q3", "C1", "C2", "C3", "IP"}));
}

TEST(CliFigure3, RowsSortedBySettingThenP) {
  const fs::path dir = scratch("sorted");
  ASSERT_EQ(invoke({"figure3", "--out", dir.string(), "--probe", "C,Q", "--setting", "3,1"}).code, 0);
  std::ifstream in(dir / "sweep.csv");
  std::string line;
  std::getline(in, line);
  std::vector<std::tuple<std::string, int, double>> keys;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string s, k, p;
    std::getline(ss, s, ',');
    std::getline(ss, k, ',');
    std::getline(ss, p, ',');
    keys.emplace_back(s, std::stoi(k), std::stod(p));
  }
  ASSERT_EQ(keys.size(), 4u * 37u);
  EXPECT_EQ(std::get<0>(keys.front()), "Q");
  EXPECT_EQ(std::get<1>(keys.front()), 1);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (std::get<0>(keys[i]) == std::get<0>(keys[i - 1]) && std::get<1>(keys[i]) == std::get<1>(keys[i - 1])) {
      EXPECT_LT(std::get<2>(keys[i - 1]), std::get<2>(keys[i]));
    }
  }
}

TEST(CliFigure3, NoisyRunsAreByteIdentical) {
  const fs::path a = scratch("noisy_a");
  const fs::path b = scratch("noisy_b");
  ASSERT_EQ(invoke({"figure3", "--noise", "0.05", "--seed", "7", "--out", a.string()}).code, 0);
  ASSERT_EQ(invoke({"figure3", "--noise", "0.05", "--seed", "7", "--out", b.string()}).code, 0);
  for (const char* f : {"figure3_a.csv", "figure3_b.csv", "figure3_c.csv", "sweep.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const fs::path c = scratch("noisy_c");
  ASSERT_EQ(invoke({"figure3", "--noise", "0.05", "--seed", "8", "--out", c.string()}).code, 0);
  EXPECT_NE(slurp(a / "sweep.csv"), slurp(c / "sweep.csv"));
}

TEST(CliFigure3, JsonFormat) {
  const fs::path dir = scratch("json");
  ASSERT_EQ(invoke({"figure3", "--format", "json", "--p-steps", "4", "--out", dir.string()}).code, 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "figure3.json"));
  EXPECT_EQ(doc["runs"].size(), 2u * 3u * 5u);
  EXPECT_TRUE(doc["runs"][0].contains("seed"));
  EXPECT_TRUE(doc["runs"][0].contains("d_meas"));
}

TEST(CliFigure3, ConfigErrorsNameTheField) {
  struct Case {
    std::vector<std::string> args;
    std::string field;
  };
  const std::vector<Case> cases = {
      {{"figure3", "--p-steps", "0"}, "--p-steps"},
      {{"figure3", "--probe", "werner"}, "--probe"},
      {{"figure3", "--setting", "4"}, "--setting"},
      {{"figure3", "--noise", "-0.1"}, "--noise"},
      {{"figure3", "--nu", "0.5"}, "--nu"},
      {{"figure3", "--format", "xml"}, "--format"},
      {{"figure3", "--theta-stop", "120"}, "--theta-stop"},
      {{"figure3", "--seed", "abc"}, "--seed"},
  };
  for (const Case& c : cases) {
    const Result r = invoke(c.args);
    EXPECT_EQ(r.code, 2) << c.field;
    EXPECT_NE(r.err.find(c.field), std::string::npos) << r.err;
  }
  EXPECT_EQ(invoke({"figure3", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
}

TEST(CliIp, WernerAndClassicalFiles) {
  const fs::path dir = scratch("ip");
  ASSERT_EQ(invoke({"probe", "--probe", "werner", "--p", "0.5", "--out", (dir / "w.json").string()}).code, 0);
  Result r = invoke({"ip", (dir / "w.json").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["ip"].get<double>(), 1.0 / 3.0, 1e-12);
  EXPECT_TRUE(doc["hierarchy_ok"].get<bool>());

  ASSERT_EQ(invoke({"probe", "--probe", "C", "--p", "0.7", "--out", (dir / "c.json").string()}).code, 0);
  r = invoke({"ip", (dir / "c.json").string(), "--format", "json"});
  doc = nlohmann::json::parse(r.out);
  EXPECT_LE(doc["ip"].get<double>(), 1e-10);
  EXPECT_NEAR(doc["argmin_theta"].get<double>(), std::numbers::pi / 2.0, 0.02);
  EXPECT_NEAR(doc["argmin_phi"].get<double>(), 0.0, 0.02);
}

TEST(CliIp, MaximallyMixedIsZero) {
  const fs::path dir = scratch("mixed");
  ipower::io::write_state_file(ipower::qmat::DensityMatrix(ipower::qmat::identity(4) / 4.0, {2, 2}),
                               dir / "m.json");
  const Result r = invoke({"ip", (dir / "m.json").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["ip"].get<double>(), 0.0);
  EXPECT_EQ(doc["lqu"].get<double>(), 0.0);
  EXPECT_EQ(doc["oracle"].get<double>(), 0.0);
}

TEST(CliIp, ExitCodes) {
  const fs::path dir = scratch("ip_errors");
  ipower::io::write_state_file(ipower::qmat::DensityMatrix(ipower::qmat::identity(6) / 6.0, {3, 2}),
                               dir / "qutrit.json");
  EXPECT_EQ(invoke({"ip", (dir / "qutrit.json").string()}).code, 3);
  std::ofstream(dir / "broken.json") << "{\"dims\":[2,2]";
  EXPECT_EQ(invoke({"ip", (dir / "broken.json").string()}).code, 2);
  std::ofstream(dir / "trace.json") << R"({"dims":[2,1],"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})";
  EXPECT_EQ(invoke({"ip", (dir / "trace.json").string()}).code, 2);
  EXPECT_EQ(invoke({"ip", (dir / "missing.json").string()}).code, 2);
}

TEST(CliEstimate, JsonRecord) {
  const Result r = invoke({"estimate", "--probe", "Q", "--p", "0.5", "--setting", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["phi_hat_mean"].get<double>(), std::numbers::pi / 4.0, 1e-6);
  EXPECT_NEAR(doc["f_exp"].get<double>(), 1.6, 1e-9);
  EXPECT_TRUE(doc["violations"].empty());
  EXPECT_EQ(invoke({"estimate", "--probe", "Q"}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--probe", "Q", "--p", "2"}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--probe", "belldiag", "--c", "0.1,0.2"}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--probe", "belldiag", "--c", "0.1,0.2,0.3"}).code, 0);
}

TEST(CliEstimate, SeedFromEnvironment) {
  ::setenv("IPOWER_SEED", "31", 1);
  const Result env = invoke({"estimate", "--p", "0.5", "--noise", "0.05"});
  ::unsetenv("IPOWER_SEED");
  const Result flag = invoke({"estimate", "--p", "0.5", "--noise", "0.05", "--seed", "31"});
  ASSERT_EQ(env.code, 0);
  EXPECT_EQ(env.out, flag.out);
  ::setenv("IPOWER_SEED", "x1", 1);
  const Result bad = invoke({"estimate", "--p", "0.5"});
  ::unsetenv("IPOWER_SEED");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("IPOWER_SEED"), std::string::npos);
}

TEST(CliAdaptive, ConvergesAndReportsNotIdentifiable) {
  const Result r = invoke({"adaptive", "--probe", "Q", "--p", "0.13", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_TRUE(doc["converged"].get<bool>());
  EXPECT_LE(doc["converged_at"].get<int>(), 5);
  EXPECT_EQ(invoke({"adaptive", "--probe", "C", "--p", "0.5", "--setting", "3"}).code, 2);
}

TEST(CliVerify, SmallEnsemblesPass) {
  const Result r = invoke({"verify", "--trials", "5", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS correlations: 9/9"), std::string::npos);
  EXPECT_EQ(invoke({"verify", "--trials", "0"}).code, 2);
}
