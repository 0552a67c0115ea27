#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = BD_CLI_PATH;
const fs::path configs = BD_CONFIG_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("berrydiag_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const fs::path& out) const {
    fs::create_directories(out);
    const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out.string() + "\" > \"" +
                            (dir_ / "stdout.txt").string() + "\" 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  int run(const std::string& args) const { return run(args, dir_); }

  fs::path write_config(const json& j, const std::string& name = "cfg.json") const {
    fs::path p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p;
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  static int lines(const fs::path& p) {
    std::ifstream in(p);
    std::string l;
    int n = 0;
    while (std::getline(in, l)) n += !l.empty();
    return n;
  }

  fs::path dir_;
};

std::string cfg(const std::string& name) { return "--config \"" + (configs / name).string() + "\""; }

}  // namespace

TEST_F(Cli, SinglePoint) {
  ASSERT_EQ(run("diagonalize " + cfg("dirac_gaussian.json")), 0);
  EXPECT_EQ(lines(dir_ / "energies.csv"), 2);
  json j = json::parse(slurp(dir_ / "energies.json"));
  EXPECT_EQ(j.at("schema_version"), "1.0");
}

TEST_F(Cli, GridOfHundred) {
  ASSERT_EQ(run("diagonalize " + cfg("dirac_pgrid.json") + " --jobs 2"), 0);
  EXPECT_EQ(lines(dir_ / "energies.csv"), 101);
}

TEST_F(Cli, ConnectionsAndCurvature) {
  EXPECT_EQ(run("connections " + cfg("neutrino_linear.json")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "connections.json"));
  EXPECT_EQ(run("curvature " + cfg("neutrino_linear.json")), 0);
  EXPECT_EQ(lines(dir_ / "curvature.csv"), 3);
}

TEST_F(Cli, UnknownModelIsConfigError) {
  fs::path p = write_config({{"model", "graphene"}, {"points", {{{"R", {0, 0, 0}}, {"P", {1, 0, 0}}}}}});
  EXPECT_EQ(run("diagonalize --config \"" + p.string() + "\""), 1);
}

TEST_F(Cli, MissingConfigIsConfigError) { EXPECT_EQ(run("diagonalize --config /nonexistent.json"), 1); }

TEST_F(Cli, NonPositiveStepIsConfigError) {
  json j = json::parse(slurp(configs / "neutrino_linear.json"));
  j["trajectory"]["dt"] = 0.0;
  EXPECT_EQ(run("trajectory --config \"" + write_config(j).string() + "\""), 1);
}

TEST_F(Cli, DegreeCap) {
  fs::path p = write_config({{"bracket_check", {{"cases", 2}, {"max_degree", 9}}}});
  EXPECT_EQ(run("bracket-check --config \"" + p.string() + "\""), 1);
}

TEST_F(Cli, PointErrorExitCode) {
  fs::path p = write_config({{"model", "neutrino_metric"},
                             {"field", {{"kind", "linear"}, {"offset", 1.0}, {"gradient", {0.05, 0, 0}}}},
                             {"points", {{{"R", {0, 0, 0}}, {"P", {0, 0, 0}}}}}});
  EXPECT_EQ(run("diagonalize --config \"" + p.string() + "\""), 2);
}

TEST_F(Cli, TrajectoryFiles) {
  json j = json::parse(slurp(configs / "neutrino_linear.json"));
  j["trajectory"]["steps"] = 1000;
  ASSERT_EQ(run("trajectory --config \"" + write_config(j).string() + "\""), 0);
  EXPECT_EQ(lines(dir_ / "trajectory_lambda+1.csv"), 12);
  EXPECT_EQ(lines(dir_ / "trajectory_lambda-1.csv"), 12);
  EXPECT_TRUE(fs::exists(dir_ / "trajectory.json"));
}

TEST_F(Cli, BracketSuite) {
  fs::path p = write_config({{"seed", 3}, {"verify", {{"symbolic_cases", 20}}}});
  ASSERT_EQ(run("verify --suite bracket --config \"" + p.string() + "\""), 0);
  json j = json::parse(slurp(dir_ / "verify.json"));
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST_F(Cli, BracketCheck) {
  fs::path p = write_config({{"seed", 3}, {"bracket_check", {{"cases", 20}, {"max_degree", 4}}}});
  EXPECT_EQ(run("bracket-check --config \"" + p.string() + "\""), 0);
}

TEST_F(Cli, TamperedToleranceFails) {
  fs::path p = write_config({{"verify", {{"points", 5}, {"tolerances", {{"free_field", 0.0}}}}}});
  EXPECT_EQ(run("verify --suite free --config \"" + p.string() + "\""), 3);
  json j = json::parse(slurp(dir_ / "verify.json"));
  EXPECT_FALSE(j.at("pass").get<bool>());
  EXPECT_FALSE(j.at("failures").empty());
}

TEST_F(Cli, UnknownSuite) { EXPECT_EQ(run("verify --suite nope"), 1); }

TEST_F(Cli, Deterministic) {
  const std::string args = "verify --suite dirac --seed 9 --config \"" +
                           write_config({{"verify", {{"points", 5}}}}).string() + "\"";
  ASSERT_EQ(run(args, dir_ / "a"), 0);
  ASSERT_EQ(run(args, dir_ / "b"), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "verify.json"), slurp(dir_ / "b" / "verify.json"));
  ASSERT_EQ(run("diagonalize " + cfg("dirac_pgrid.json") + " --jobs 1", dir_ / "c"), 0);
  ASSERT_EQ(run("diagonalize " + cfg("dirac_pgrid.json") + " --jobs 3", dir_ / "d"), 0);
  EXPECT_EQ(slurp(dir_ / "c" / "energies.json"), slurp(dir_ / "d" / "energies.json"));
}
