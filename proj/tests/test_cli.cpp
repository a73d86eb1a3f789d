#include "pswfrec/cli.hpp"
#include "pswfrec/experiments.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using pswfrec::run_cli;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("pswfrec_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int run(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return run_cli(args, out, err);
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
  }

  fs::path dir;
  std::ostringstream out, err;
};

// Runs the installed binary in a fresh process.
int spawn(const std::string& args) {
  const std::string cmd = std::string("\"") + PSWFREC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_F(Cli, BasisEigenvaluesSumToShannonNumber) {
  ASSERT_EQ(run({"basis", "-o", path("basis.json")}), 0) << err.str();
  const auto j = nlohmann::json::parse(slurp(path("basis.json")));
  const auto ev = j.at("eigenvalues").get<std::vector<double>>();
  ASSERT_EQ(ev.size(), 21u);
  double sum = 0.0;
  for (double l : ev) sum += l;
  EXPECT_NEAR(sum, 21.0 / M_PI, 1e-9);
  EXPECT_NE(out.str().find("21 functions"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({"basis", "--time-bandwidth", "3.2", "-o", path("b.json")}), 2);
  EXPECT_EQ(run({"basis", "--time-bandwidth", std::to_string(M_PI), "-o", path("b.json")}), 2);
  EXPECT_EQ(run({"experiment", "--preset", "paper-other", "-o", path("x")}), 2);
  EXPECT_EQ(run({"experiment", "--config", path("missing.json"), "-o", path("x")}), 2);
  EXPECT_NE(err.str().find("missing.json"), std::string::npos);
  EXPECT_EQ(run({"sweep", "--preset", "paper-uniform", "--axis", "seed", "--values", "1"}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_FALSE(fs::exists(path("b.json")));
}

TEST_F(Cli, ConfigFileIsValidated) {
  std::ofstream(path("bad.json")) << R"({"noise": {"burst_std": -1}})";
  EXPECT_EQ(run({"experiment", "--config", path("bad.json"), "-o", path("x")}), 2);
  std::ofstream(path("junk.json")) << "{ not json";
  EXPECT_EQ(run({"experiment", "--config", path("junk.json"), "-o", path("x")}), 2);
  std::ofstream(path("ok.json")) << R"({"seed": 11, "estimators": ["PSWF"]})";
  ASSERT_EQ(run({"experiment", "--preset", "paper-uniform", "--config", path("ok.json"), "-o", path("x")}), 0)
      << err.str();
  const auto j = nlohmann::json::parse(slurp(path("x/report.json")));
  EXPECT_EQ(j.at("config").at("seed"), 11);
  EXPECT_EQ(j.at("estimators").size(), 1u);
}

TEST_F(Cli, ExperimentOutputsMatchLibrary) {
  ASSERT_EQ(run({"experiment", "--preset", "paper-nonuniform", "--seed", "3", "-o", path("run")}), 0) << err.str();
  auto c = pswfrec::preset_config("paper-nonuniform");
  c.seed = 3;
  const auto rep = pswfrec::run_experiment(c);
  EXPECT_EQ(slurp(path("run/reconstruction.csv")), rep.reconstruction_csv());
  EXPECT_EQ(nlohmann::json::parse(slurp(path("run/report.json"))), rep.to_json());
  const auto header = lines(slurp(path("run/reconstruction.csv"))).front();
  EXPECT_EQ(header, "t,x_true,y,RSinc,ESinc,RPSWF,EPSWF");
}

TEST_F(Cli, ExperimentIsDeterministicAcrossProcesses) {
  const std::string args = "experiment --preset paper-uniform --seed 7 -o ";
  ASSERT_EQ(spawn(args + path("a")), 0);
  ASSERT_EQ(spawn(args + path("b")), 0);
  for (const char* f : {"report.json", "reconstruction.csv"}) {
    const auto a = slurp(path(std::string("a/") + f));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(path(std::string("b/") + f))) << f;
  }
}

TEST_F(Cli, MultiSeedReport) {
  ASSERT_EQ(run({"experiment", "--preset", "paper-uniform", "--seeds", "4", "--jobs", "2", "-o", path("m")}), 0)
      << err.str();
  const auto j = nlohmann::json::parse(slurp(path("m/report.json")));
  EXPECT_EQ(j.at("seeds").at("count"), 4);
  EXPECT_EQ(j.at("aggregate"), "median");
  for (const auto& e : j.at("estimators")) {
    const auto errs = e.at("errors").get<std::vector<double>>();
    ASSERT_EQ(errs.size(), 4u);
    EXPECT_EQ(e.at("value").get<double>(), pswfrec::median(errs));
  }
}

TEST_F(Cli, SweepRowCounts) {
  ASSERT_EQ(run({"sweep", "--preset", "paper-uniform", "--axis", "burst_std", "--values", "0,1,5,20", "--seeds",
                 "2", "-o", path("s")}),
            0)
      << err.str();
  auto rows = lines(slurp(path("s/sweep.csv")));
  EXPECT_EQ(rows.size(), 1u + 4 * 4);
  EXPECT_EQ(rows[0].substr(0, rows[0].find(',')), "burst_std");

  ASSERT_EQ(run({"sweep", "--preset", "paper-nonuniform", "--axis", "lambda", "--values", "1e-4,1e-3,1e-2,1e-1,1",
                 "--estimators", "RPSWF,EPSWF", "-o", path("l")}),
            0)
      << err.str();
  rows = lines(slurp(path("l/sweep.csv")));
  ASSERT_EQ(rows.size(), 1u + 5 * 2);
  EXPECT_EQ(rows[1].substr(0, rows[1].find(',', rows[1].find(',') + 1)), "0.0001,RPSWF");
}

TEST_F(Cli, RobustErrorPlateausInNTerms) {
  ASSERT_EQ(run({"sweep", "--preset", "paper-uniform", "--axis", "n_terms", "--values", "8,20,26,30,34",
                 "--estimators", "EPSWF", "--seeds", "9", "--jobs", "4", "-o", path("n")}),
            0)
      << err.str();
  const auto rows = lines(slurp(path("n/sweep.csv")));
  ASSERT_EQ(rows.size(), 6u);
  std::vector<double> e;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    std::string cell;
    for (int k = 0; k < 4; ++k) std::getline(row, cell, ',');
    e.push_back(std::stod(cell));
  }
  // Few terms underfit; past the concentrated functions the error stops moving.
  EXPECT_GT(e[0], 10 * e[2]);
  EXPECT_GT(e[1], e[2]);
  EXPECT_LT(std::abs(e[3] - e[2]), 0.05 * e[2]);
  EXPECT_LT(std::abs(e[4] - e[2]), 0.05 * e[2]);
}

TEST_F(Cli, ReconstructFromSampleCsv) {
  {
    std::ofstream in(path("samples.csv"));
    in.precision(17);
    in << "t,y\n";
    for (int i = 0; i < 64; ++i) {
      const double t = i / 63.0;
      in << t << ',' << pswfrec::generate_test_signal(t) << '\n';
    }
  }
  ASSERT_EQ(run({"reconstruct", "-i", path("samples.csv"), "--estimators", "PSWF,EPSWF", "--lambda", "1e-10",
                 "--half-length", "20", "--time-bandwidth", std::to_string(M_PI / 2), "--omega0",
                 std::to_string(M_PI), "--n-terms", "28", "-o", path("r")}),
            0)
      << err.str();
  const auto j = nlohmann::json::parse(slurp(path("r/report.json")));
  ASSERT_EQ(j.at("estimators").size(), 2u);
  for (const auto& e : j.at("estimators")) {
    EXPECT_EQ(e.at("status"), "ok");
    EXPECT_LT(e.at("sample_rmse").get<double>(), 1e-4);
  }
  const auto rows = lines(slurp(path("r/reconstruction.csv")));
  EXPECT_EQ(rows.front(), "t,y,PSWF,EPSWF");
  EXPECT_EQ(rows.size(), 1u + 2048 + 64 - 2);

  std::ofstream(path("bad.csv")) << "t,y\n0,1\nx,2\n";
  EXPECT_EQ(run({"reconstruct", "-i", path("bad.csv"), "-o", path("r2")}), 2);
  std::ofstream(path("dup.csv")) << "0,1\n0,2\n";
  EXPECT_EQ(run({"reconstruct", "-i", path("dup.csv"), "-o", path("r3")}), 2);
}
