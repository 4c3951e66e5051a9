#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mvsdde/cli.hpp"
#include "mvsdde/config.hpp"
#include "mvsdde/csv_io.hpp"
#include "mvsdde/error.hpp"
#include "oracles.hpp"

using namespace mvsdde;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mvsdde_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

const char* kPureDelay = R"({
  "grid": {"tau": 1.0, "T": 2.0, "steps_per_delay": 200},
  "model": {"name": "pure_delay"},
  "run": {"particles": 1, "measure_times": [2.0]}
})";

const char* kOpinionSmall = R"({
  "grid": {"tau": 0.25, "T": 0.5, "steps_per_delay": 8},
  "model": {"name": "opinion", "opinion": {"kernel": {"shape": "tent"}}},
  "run": {"particles": 32, "measure_times": [0.25, 0.5]},
  "fixpoint": {"particles": 32},
  "verify": {"probes": 2000, "particles": 64, "atoms": 16, "radial_particles": 64}
})";

}  // namespace

TEST(Csv, MeasureRoundTrip) {
  Eigen::MatrixXd atoms(4, 3);
  atoms << 0.1, -2.5, 1e-300, 3.0 / 7.0, 4, 5, 6, 7, 8, 9, 10, 1.0 / 3.0;
  const EmpiricalMeasure mu(1, 2, atoms);
  std::stringstream s;
  write_measure_csv(s, mu);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "particle,xm1_1,xm1_2,x0_1,x0_2");
  const EmpiricalMeasure back = read_measure_csv(s);
  EXPECT_EQ(back.n_delays(), 1);
  EXPECT_EQ(back.dim(), 2);
  EXPECT_EQ(back.atoms(), atoms);
}

TEST(Csv, MalformedRowNamesLine) {
  std::stringstream s("particle,xm1_1,x0_1\n0,1,2\n1,abc,3\n");
  try {
    read_measure_csv(s);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, MissingTauIsRejected) {
  EXPECT_THROW(parse_config(R"({"grid": {"T": 1, "steps_per_delay": 4}, "model": {"name": "pure_delay"}})"),
               ConfigError);
}

TEST(Config, Defaults) {
  const Config c = parse_config(kPureDelay);
  EXPECT_EQ(c.model.name, "pure_delay");
  EXPECT_EQ(c.fixpoint.max_iter, 50);
  EXPECT_EQ(c.verify.constants, "declared");
  EXPECT_EQ(c.convergence.seeds, 20u);
}

TEST(Config, UnknownModelAndBadValues) {
  EXPECT_THROW(parse_config(R"({"grid": {"tau": 1, "T": 1, "steps_per_delay": 4}, "model": {"name": "x"}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"grid": {"tau": 1, "T": 1.1, "steps_per_delay": 2}, "model": {"name": "pure_delay"}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"grid": {"tau": 1, "T": 1, "steps_per_delay": 4}, "model": {"name": "pure_delay"},
                                "fixpoint": {"max_iter": 0}})"),
               ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Cli, SimulatePureDelay) {
  const fs::path dir = scratch("simulate");
  const auto cfg = write_file(dir / "c.json", kPureDelay);
  ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}), cli::kSuccess);
  const EmpiricalMeasure mu = read_measure_csv_file((dir / "out" / "measure_t2.csv").string());
  EXPECT_NEAR(mu.lag(0, 0)(0), -0.5, 5.0 * 0.005);
  const std::string paths = slurp(dir / "out" / "paths.csv");
  EXPECT_EQ(paths.substr(0, paths.find('\n')), "particle,t,x_1");
  ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "again").string()}), cli::kSuccess);
  EXPECT_EQ(paths, slurp(dir / "again" / "paths.csv"));
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  const fs::path dir = scratch("errors");
  EXPECT_EQ(run_cli({"simulate"}), cli::kUsageError);
  EXPECT_EQ(run_cli({"bogus"}), cli::kUsageError);
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "missing.json").string()}), cli::kUsageError);
  const auto bad = write_file(dir / "bad.json", R"({"grid": {"T": 1, "steps_per_delay": 4}, "model": {"name": "pure_delay"}})");
  EXPECT_EQ(run_cli({"simulate", "--config", bad.string(), "--out", dir.string()}), cli::kUsageError);
  const auto zero = write_file(dir / "zero.json", R"({"grid": {"tau": 1, "T": 1, "steps_per_delay": 4},
      "model": {"name": "pure_delay"}, "fixpoint": {"max_iter": 0}})");
  EXPECT_EQ(run_cli({"fixpoint", "--config", zero.string(), "--out", dir.string()}), cli::kUsageError);
}

TEST(Cli, NumericBlowUpExitsThree) {
  const fs::path dir = scratch("blowup");
  const auto cfg = write_file(dir / "c.json", R"({"grid": {"tau": 1, "T": 200, "steps_per_delay": 2},
      "model": {"name": "delayed_ou", "delayed_ou": {"a": -1000, "c": 0, "sigma": 0}}})");
  EXPECT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", dir.string()}), cli::kNumericFailure);
}

TEST(Cli, FixpointMeasureFreeHasZeroSecondDistance) {
  const fs::path dir = scratch("fixpoint");
  const auto cfg = write_file(dir / "c.json", R"({"grid": {"tau": 0.5, "T": 1, "steps_per_delay": 8},
      "model": {"name": "delayed_ou"}, "fixpoint": {"particles": 16}})");
  ASSERT_EQ(run_cli({"fixpoint", "--config", cfg.string(), "--out", dir.string()}), cli::kSuccess);
  std::istringstream csv(slurp(dir / "picard.csv"));
  std::string header, first, second;
  std::getline(csv, header);
  std::getline(csv, first);
  std::getline(csv, second);
  EXPECT_EQ(header, "iteration,distance,ratio");
  EXPECT_EQ(second.substr(0, 4), "2,0,");
  EXPECT_NE(slurp(dir / "summary.json").find("\"converged\": true"), std::string::npos);
}

TEST(Cli, VerifyOpinionDeclaredHalvedAndEstimate) {
  const fs::path dir = scratch("verify");
  const auto cfg = write_file(dir / "c.json", kOpinionSmall);
  EXPECT_EQ(run_cli({"verify", "--config", cfg.string(), "--out", (dir / "ok").string()}), cli::kSuccess);

  std::string halved = kOpinionSmall;
  halved.replace(halved.find("\"probes\""), 0, "\"K_scale\": 0.5, ");
  const auto cfg_half = write_file(dir / "half.json", halved);
  EXPECT_EQ(run_cli({"verify", "--config", cfg_half.string(), "--out", (dir / "half").string()}),
            cli::kVerificationFailed);
  const std::string summary = slurp(dir / "half" / "summary.json");
  EXPECT_NE(summary.find("\"y\""), std::string::npos);

  std::string estimate = kOpinionSmall;
  estimate.replace(estimate.find("\"probes\""), 0, "\"constants\": \"estimate\", ");
  const auto cfg_est = write_file(dir / "est.json", estimate);
  EXPECT_EQ(run_cli({"verify", "--config", cfg_est.string(), "--out", (dir / "est").string()}), cli::kSuccess);
}

TEST(Cli, TransportExamples) {
  const fs::path dir = scratch("transport");
  const auto a = write_file(dir / "a.csv", "particle,xm1_1,x0_1\n0,0,0\n");
  const auto b = write_file(dir / "b.csv", "particle,xm1_1,x0_1\n0,0,2\n");
  const auto c = write_file(dir / "c.csv", "particle,xm1_1,x0_1\n0,0,2\n1,1,1\n");
  std::string out;
  ASSERT_EQ(run_cli({"transport", a.string(), b.string(), "--psi", "identity", "--V", "quadratic"}, &out),
            cli::kSuccess);
  EXPECT_EQ(out, "5\n");
  ASSERT_EQ(run_cli({"transport", c.string(), c.string()}, &out), cli::kSuccess);
  EXPECT_EQ(out, "0\n");
  EXPECT_EQ(run_cli({"transport", a.string(), c.string()}), cli::kUsageError);

  // Five-atom files against the permutation oracle.
  Eigen::MatrixXd x(2, 5), y(2, 5);
  x << 0.3, -1.2, 0.8, 2.0, -0.1, 1.1, 0.0, -0.7, 0.4, 1.9;
  y << -0.5, 0.9, 1.3, -2.2, 0.6, 0.2, -1.0, 0.7, 1.5, -0.3;
  std::ofstream(dir / "x.csv") << [&] {
    std::stringstream s;
    write_measure_csv(s, EmpiricalMeasure(1, 1, x));
    return s.str();
  }();
  std::ofstream(dir / "y.csv") << [&] {
    std::stringstream s;
    write_measure_csv(s, EmpiricalMeasure(1, 1, y));
    return s.str();
  }();
  ASSERT_EQ(run_cli({"transport", (dir / "x.csv").string(), (dir / "y.csv").string(), "--psi", "quadratic", "--V",
                     "quadratic"},
                    &out),
            cli::kSuccess);
  EXPECT_NEAR(std::stod(out), oracle::brute_force_transport(x, y, 1, 1, true, true), 1e-9);
}

TEST(Cli, ExecutableMatchesLibraryEntryPoint) {
  const fs::path dir = scratch("exe");
  const auto cfg = write_file(dir / "c.json", kPureDelay);
  const std::string cmd = std::string(MVSDDE_CLI_PATH) + " simulate --config " + cfg.string() + " --out " +
                          (dir / "out").string() + " --threads 2";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "paths.csv"));
}
