/* Copyright 2026 The spinbath Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinbath/analysis.hpp"
#include "spinbath/constants.hpp"
#include "spinbath/decoherence.hpp"
#include "spinbath_cli/app.hpp"
#include "spinbath_cli/manifest.hpp"
#include "spinbath_cli/run_config.hpp"

namespace spinbath::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "spinbath");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("spinbath_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  std::string slurp(const std::string& rel) const { return read_file(dir_ / rel); }

  fs::path dir_;
};

TEST_F(CliTest, GenBathWritesOneFilePerRealization) {
  const auto r = run({"gen-bath", "--ppm", "100", "--n", "100", "--seed", "42", "--out", path("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a" / "baths" / "ppm_100")) {
    files += e.path().extension() == ".json" ? 1 : 0;
  }
  EXPECT_EQ(files, 100u);
  const auto manifest = nlohmann::json::parse(slurp("a/gen-bath.manifest.json"));
  EXPECT_EQ(manifest["command"], "gen-bath");
  EXPECT_GE(manifest["outputs"].size(), 101u);

  ASSERT_EQ(run({"gen-bath", "--ppm", "100", "--n", "100", "--seed", "42", "--out", path("b")}).code, 0);
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a" / "baths")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(read_file(e.path()), read_file(dir_ / "b" / rel)) << rel;
  }
}

TEST_F(CliTest, UnwritableOutputIsDataError) {
  std::ofstream(path("blocker")) << "x";
  const auto r = run({"gen-bath", "--ppm", "10", "--n", "2", "--out", path("blocker/sub")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("blocker"), std::string::npos) << r.err;
}

TEST_F(CliTest, SweepTableAndWorkerIndependence) {
  const std::vector<std::string> base{"sweep", "--ppm", "1,10,100", "--n", "300", "--seed", "7", "--bootstrap", "10"};
  auto a = base;
  a.insert(a.end(), {"--workers", "1", "--out", path("w1")});
  auto b = base;
  b.insert(b.end(), {"--workers", "8", "--out", path("w8")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const auto csv = slurp("w1/sweep.csv");
  EXPECT_EQ(csv, slurp("w8/sweep.csv"));
  EXPECT_EQ(slurp("w1/sweep.json"), slurp("w8/sweep.json"));
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_NE(header.find("t2_star_s"), std::string::npos);
  EXPECT_NE(header.find("t2_s"), std::string::npos);
  int rows = 0;
  std::vector<double> ppm;
  std::vector<double> t2s;
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    ++rows;
    std::istringstream f(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(f, cell, ',')) v.push_back(std::stod(cell));
    ppm.push_back(v[0]);
    t2s.push_back(v[4]);
  }
  EXPECT_EQ(rows, 3);
  const auto slope = fit_power_law(ppm, t2s).exponent;
  EXPECT_NEAR(slope, -1.0, 0.1);
  EXPECT_TRUE(fs::exists(dir_ / "w1" / "figure_scaling.json"));
}

TEST_F(CliTest, WorkersFromEnvironment) {
  ::setenv("SPINBATH_WORKERS", "3", 1);
  EXPECT_EQ(resolve_worker_count(std::nullopt, std::nullopt), 3u);
  EXPECT_EQ(resolve_worker_count(2u, std::nullopt), 2u);
  EXPECT_EQ(resolve_worker_count(std::nullopt, 5u), 5u);
  ::setenv("SPINBATH_WORKERS", "zero", 1);
  EXPECT_EQ(run({"sweep", "--ppm", "10", "--n", "100", "--out", path("x")}).code, 2);
  ::unsetenv("SPINBATH_WORKERS");
  EXPECT_EQ(resolve_worker_count(std::nullopt, std::nullopt), 1u);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  std::ofstream(path("run.conf")) << "[run]\nseed = 11\n\n[bath]\nconcentrations = 5, 50\nn_realizations = 150\n"
                                     "\n[fit]\nbootstrap = 5\n";
  ASSERT_EQ(run({"sweep", "--config", path("run.conf"), "--ppm", "20", "--out", path("c")}).code, 0);
  const auto j = nlohmann::json::parse(slurp("c/sweep.json"));
  ASSERT_EQ(j["points"].size(), 1u);
  EXPECT_EQ(j["points"][0]["concentration_ppm"], 20.0);
  EXPECT_EQ(j["points"][0]["n_realizations"], 150);
  EXPECT_EQ(j["config"]["seed"], 11);

  std::ofstream(path("bad.conf")) << "[bath]\ncolour = blue\n";
  EXPECT_EQ(run({"sweep", "--config", path("bad.conf"), "--out", path("d")}).code, 2);
  EXPECT_EQ(run({"sweep", "--config", path("missing.conf"), "--out", path("d")}).code, 3);
}

TEST_F(CliTest, ManifestReproducesRun) {
  ASSERT_EQ(run({"sweep", "--ppm", "4", "--n", "120", "--bootstrap", "4", "--seed", "3", "--out", path("m")}).code, 0);
  // The stored config alone regenerates the artifacts.
  ASSERT_EQ(run({"sweep", "--config", path("m/sweep.conf"), "--out", path("m2")}).code, 0);
  EXPECT_EQ(slurp("m/sweep.csv"), slurp("m2/sweep.csv"));
  const auto manifest = nlohmann::json::parse(slurp("m/sweep.manifest.json"));
  for (const auto& o : manifest["outputs"]) {
    EXPECT_EQ(o["sha256"], sha256_hex(read_file(dir_ / "m" / o["path"].get<std::string>())));
  }
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_TRUE(manifest.contains("created_utc"));
}

TEST_F(CliTest, DecayEnsembleFidValue) {
  std::ofstream(path("params.json")) << R"({"delta_ens_rad_s": 1e6, "tau_c_ens_s": 1e-4, "lambda_s": 1e-4})";
  ASSERT_EQ(run({"decay", "--params", path("params.json"), "--t-min", "0", "--t-max", "1e-6", "--points", "11",
                 "--out", path("d")})
                .code,
            0);
  const auto curve = decay_curve_from_csv(slurp("d/decay_ensemble_ramsey.csv"));
  EXPECT_NEAR(curve.times.back(), 1e-6, 1e-18);
  EXPECT_NEAR(curve.values.back(), 0.6839, 1e-4);
  EXPECT_TRUE(fs::exists(dir_ / "d" / "decay_ensemble_ramsey.json"));
  EXPECT_TRUE(fs::exists(dir_ / "d" / "figure_decay_ensemble_ramsey.json"));
}

TEST_F(CliTest, DecaySingleEchoThenFit) {
  ASSERT_EQ(run({"decay", "--single", "--sequence", "echo", "--delta", "5e6", "--tau-c", "1e-3", "--points", "150",
                 "--out", path("e")})
                .code,
            0);
  const auto r = run({"fit", "--curve", path("e/decay_single_echo.csv"), "--out", path("e")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp("e/fit_report.json"));
  EXPECT_NEAR(report["fit"]["p"].get<double>(), 3.0, 0.1);
}

TEST_F(CliTest, DecayMissingParams) {
  EXPECT_EQ(run({"decay", "--params", path("nope.json"), "--out", path("x")}).code, 3);
  EXPECT_EQ(run({"decay", "--out", path("x")}).code, 2);
}

TEST_F(CliTest, FitScalingRoundTrip) {
  const double b = kTwoPi * 1.0e3;
  const double t_other = 694e-6;
  std::vector<SamplePoint> pts;
  for (double c : {0.1, 0.5, 2.0, 10.0, 40.0}) {
    SamplePoint p;
    p.concentration_ppm = c;
    p.t_seconds = 1.0 / (b * c + 1.0 / t_other);
    pts.push_back(p);
  }
  std::ofstream(path("inverse_linear.csv")) << to_csv(pts);
  const auto r = run({"fit", "--samples", path("inverse_linear.csv"), "--offset", "--out", path("f")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp("f/fit_report.json"));
  const auto& fit = j["fits"][0]["fit"];
  EXPECT_NEAR(fit["rate_per_ppm_rad_s"].get<double>() / b, 1.0, 1e-6);
  EXPECT_NEAR(fit["t_other_s"].get<double>() / t_other, 1.0, 1e-6);
}

TEST_F(CliTest, FitLogsBasisNormalization) {
  std::ofstream(path("dq.csv")) << sample_csv_header() << "\n"
                                << "1,0,0.5e-5,0,0,,double_quantum,c12_enriched,t2star\n"
                                << "3,0,3.3e-6,0,0,,single_quantum,c12_enriched,t2star\n"
                                << "10,0,1e-6,0,0,,single_quantum,c12_enriched,t2star\n";
  const auto r = run({"fit", "--samples", path("dq.csv"), "--out", path("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE((r.out + r.err).find("basis normalization"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp("g/fit_report.json"));
  EXPECT_EQ(j["basis_normalized_rows"], 1);
}

TEST_F(CliTest, FitRejectsShortCurvesAndBadRows) {
  DecayCurve c;
  c.scale = CurveScale::Coherence;
  c.times = linear_grid(0.0, 1.0, 6);
  for (double t : c.times) c.values.push_back(std::exp(-3.0 * t));
  std::ofstream(path("short.csv")) << to_csv(c);
  const auto r = run({"fit", "--curve", path("short.csv"), "--out", path("h")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("8"), std::string::npos) << r.err;

  std::ofstream(path("bad.csv")) << sample_csv_header() << "\n1,0,abc,0,0,,single_quantum,c13_natural,t2\n";
  const auto bad = run({"fit", "--samples", path("bad.csv"), "--out", path("h")});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("row 2"), std::string::npos) << bad.err;
}

TEST_F(CliTest, ReportPipeline) {
  ASSERT_EQ(run({"sweep", "--ppm", "1,10,100", "--n", "300", "--bootstrap", "5", "--out", path("r")}).code, 0);
  const auto r = run({"report", "--run-dir", path("r"), "--format", "both"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp("r/report.json"));
  for (const char* key : {"table", "fits", "ratio_a_over_b", "stretch_exponents", "comparison"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  ASSERT_EQ(j["table"].size(), 3u);
  for (const auto& row : j["table"]) {
    const double ratio = row["ratio"].get<double>();
    EXPECT_GT(ratio, 1.0);
    EXPECT_LT(ratio, 100.0);
  }
  EXPECT_NE(slurp("r/report.md").find("| [N] (ppm)"), std::string::npos);

  ASSERT_EQ(run({"report", "--run-dir", path("r"), "--format", "json"}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp("r/report.json"))["table"], j["table"]);
}

TEST_F(CliTest, ReportEmptyDirectory) {
  fs::create_directories(dir_ / "empty");
  const auto r = run({"report", "--run-dir", path("empty")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("sweep.json"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"sweep", "--unknown"}).code, 2);
  EXPECT_EQ(run({"sweep", "--ppm", "-3", "--out", path("u")}).code, 2);
  EXPECT_EQ(run({"sweep", "--workers", "0", "--out", path("u")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

}  // namespace
}  // namespace spinbath::cli
