#include "steer/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("steer_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" + STEER_CLI_PATH + "' " + args + " 2>&1";
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  std::string write_config(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }

  steer::Json read_json(const std::string& rel) const {
    return steer::Json::parse(steer::read_text_file((dir_ / rel).string()));
  }

  static std::string config(const std::string& name) { return std::string(STEER_SOURCE_DIR) + "/tools/configs/" + name; }

  fs::path dir_;
};

std::string noon_config(double eta) {
  return R"({"version": 1, "scenario": {"family": "noon", "N": 1, "eta": )" + std::to_string(eta) +
         R"(, "d": 6}, "string_set": {"named": "noon11"}, "policy": "local-restricted"})";
}

}  // namespace

TEST_F(Cli, SolveWernerSteering) {
  const auto r = run("--out o solve --config " + config("werner.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rep = read_json("o/report.json");
  EXPECT_EQ(rep["decision"], "steering");
  EXPECT_EQ(rep["certificate"]["accepted"], true);
  EXPECT_NEAR(rep["lambda_star"].get<double>(), 1.0 - std::sqrt(3.0) * 0.8, 1e-7);
  EXPECT_LE(std::abs(rep["duality_gap"].get<double>()), 1e-6);
  EXPECT_FALSE(rep.contains("timings_ms"));
  EXPECT_TRUE(fs::exists(dir_ / "o/witness.json"));
}

TEST_F(Cli, SolveNoonDecisions) {
  auto r = run("--out lo solve --config " + write_config("lo.json", noon_config(0.60)));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(read_json("lo/report.json")["decision"], "no-detection");
  r = run("--out hi solve --config " + write_config("hi.json", noon_config(0.75)));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(read_json("hi/report.json")["decision"], "steering");
}

TEST_F(Cli, ReportsAreReproducible) {
  ASSERT_EQ(run("--out a solve --config " + config("random.json")).code, 0);
  ASSERT_EQ(run("--out a2 solve --config " + config("random.json")).code, 0);
  auto a = read_json("a/report.json");
  auto b = read_json("a2/report.json");
  a["config"].erase("output");
  b["config"].erase("output");
  a.erase("witness_path");
  b.erase("witness_path");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(read_json("a/witness.json").dump(), read_json("a2/witness.json").dump());
}

TEST_F(Cli, TimingsOnlyOnRequest) {
  ASSERT_EQ(run("--timings --out t solve --config " + config("werner.json")).code, 0);
  EXPECT_TRUE(read_json("t/report.json").contains("timings_ms"));
}

TEST_F(Cli, DumpsTemplateAndSdpa) {
  ASSERT_EQ(run("--dump-template --dump-sdpa --out d solve --config " + config("werner.json")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "d/template.json"));
  EXPECT_TRUE(fs::exists(dir_ / "d/problem.dat-s"));
}

TEST_F(Cli, ConfigErrors) {
  EXPECT_EQ(run("solve --config missing.json").code, 2);
  EXPECT_EQ(run("solve --config " + write_config("bad.json", "{ not json")).code, 2);
  EXPECT_EQ(run("solve --config " +
                write_config("key.json", R"({"version": 1, "scenario": {"family": "werner", "w": 0.5}, "colour": 1})"))
                .code,
            2);
  EXPECT_EQ(run("solve --config " + write_config("ver.json", R"({"version": 9, "scenario": {"family": "werner", "w": 0.5}})"))
                .code,
            2);
  EXPECT_EQ(run("solve --config " + write_config("fam.json", R"({"version": 1, "scenario": {"family": "ghz"}})")).code, 2);
  EXPECT_EQ(run("--tol 1e-2 solve --config " + config("werner.json")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, ScanWerner) {
  const auto r = run("--out s scan --config " + config("werner.json") + " --param w --min 0.3 --max 0.9 --tol 1e-3");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rep = read_json("s/scan.json");
  EXPECT_NEAR(rep["threshold"].get<double>(), 1.0 / std::sqrt(3.0), 1e-3);
  EXPECT_GE(rep["history"].size(), 3u);
}

TEST_F(Cli, ScanParallelMatchesThreshold) {
  const auto r =
      run("--out s scan --config " + config("werner.json") + " --param w --min 0.3 --max 0.9 --tol 1e-3 --jobs 3");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(read_json("s/scan.json")["threshold"].get<double>(), 1.0 / std::sqrt(3.0), 1e-3);
}

TEST_F(Cli, ScanWithoutBracket) {
  const auto r = run("--out s scan --config " + config("noon.json") + " --param eta --min 0.70 --max 0.95 --tol 5e-3");
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_NE(r.out.find("no threshold in range"), std::string::npos);
}

TEST_F(Cli, ScanUnknownParameter) {
  EXPECT_EQ(run("scan --config " + config("werner.json") + " --param zeta --min 0 --max 1").code, 2);
}

TEST_F(Cli, WitnessExtractWerner) {
  const auto cfg = write_config("w1.json", R"({"version": 1, "scenario": {"family": "werner", "w": 1.0}})");
  ASSERT_EQ(run("--out x witness extract --config " + cfg).code, 0);
  const auto w = read_json("x/witness.json");
  ASSERT_EQ(w["terms"].size(), 3u);
  for (const auto& t : w["terms"]) EXPECT_NEAR(std::stod(t["coeff"][0].get<std::string>()), 1.0, 1e-6);
  EXPECT_NEAR(std::stod(w["constant"].get<std::string>()), std::sqrt(3.0), 1e-5);
}

TEST_F(Cli, WitnessEvalFixture) {
  const auto cfg = write_config(
      "n1.json", R"({"version": 1, "scenario": {"family": "noon", "N": 1, "eta": 1.0, "d": 6, "alice_sign": -1}})");
  const auto r = run("witness eval --witness fixture:single-photon --config " + cfg);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto pos = r.out.find("beta");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(r.out.substr(pos + 4)), -0.1556, 5e-3);
}

TEST_F(Cli, WitnessEvalFixtureDocument) {
  const auto cfg = write_config(
      "n067.json", R"({"version": 1, "scenario": {"family": "noon", "N": 1, "eta": 0.67, "d": 6, "alice_sign": -1}})");
  const auto r =
      run("witness eval --witness " + std::string(STEER_SOURCE_DIR) + "/fixtures/single_photon_witness.json --config " + cfg);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(std::stod(r.out.substr(r.out.find("beta") + 4)), -8.88e-4, 2e-3);
}

TEST_F(Cli, WitnessEvalOnUnsteerableData) {
  ASSERT_EQ(run("--out x witness extract --config " + config("werner.json")).code, 0);
  for (int seed : {1, 2, 3}) {
    const auto cfg = write_config(
        "r.json", R"({"version": 1, "scenario": {"family": "random-unsteerable", "n_inputs": 3, "dim_b": 2}, "seed": )" +
                      std::to_string(seed) + "}");
    const auto r = run("witness eval --witness x/witness.json --config " + cfg);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_GE(std::stod(r.out.substr(r.out.find("beta") + 4)), -1e-7);
  }
}

TEST_F(Cli, WitnessEvalBadDocument) {
  const auto doc = write_config("bad_w.json", R"({"version": 1, "terms": []})");
  EXPECT_EQ(run("witness eval --witness " + doc + " --config " + config("werner.json")).code, 2);
}

TEST_F(Cli, Analytic) {
  auto r = run("analytic gaussian-det --r 0.4");
  ASSERT_EQ(r.code, 0);
  auto j = steer::Json::parse(r.out);
  EXPECT_EQ(j["steering"], true);
  r = run("analytic pauli-nonlinear --werner 0.5");
  ASSERT_EQ(r.code, 0);
  j = steer::Json::parse(r.out);
  EXPECT_EQ(j["steering"], false);
  EXPECT_NEAR(j["value"].get<double>(), 0.75, 1e-15);
  r = run("analytic pauli-linear --corr -1 -1 -1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(steer::Json::parse(r.out)["steering"], true);
  r = run("analytic gaussian-wiseman --std 2 2 0 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(steer::Json::parse(r.out)["steering"], false);
  EXPECT_EQ(run("analytic pauli-cubic --werner 0.5").code, 2);
  EXPECT_EQ(run("analytic pauli-linear").code, 2);
}
