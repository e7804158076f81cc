// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adel/models.hpp"
#include "adel/runner.hpp"
#include "support/oracles.hpp"

using namespace adel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  TempDir() {
    path = fs::temp_directory_path() /
           ("adel_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

ExperimentConfig base_config(const fs::path& out) {
  ExperimentConfig config;
  config.task = "simulate";
  config.model_ref = "builtin:single_level";
  config.out_dir = out;
  config.grid = GridSpec{0.0, 10.0, 41};
  config.threads = 1;
  return config;
}

}  // namespace

TEST_CASE("GridSpec parsing") {
  const GridSpec grid = GridSpec::parse("0:2.5:11");
  CHECK(grid.t0 == 0.0);
  CHECK(grid.t1 == 2.5);
  CHECK(grid.n == 11);
  CHECK(grid.points().size() == 11);
  CHECK_THROWS_AS(GridSpec::parse("nonsense"), Error);
  CHECK_THROWS_AS(GridSpec::parse("1:0:5"), Error);
  CHECK_THROWS_AS(GridSpec::parse("0:1:1"), Error);
}

TEST_CASE("resolve_model") {
  CHECK(resolve_model("builtin:fano_fig3", {}).continua.size() == 1);
  CHECK_THROWS_AS(resolve_model("builtin:unknown", {}), Error);
  CHECK_THROWS_AS(resolve_model("/nonexistent/path.json", {}), Error);

  TempDir tmp;
  const fs::path model_file = tmp.path / "model.json";
  {
    std::ofstream out(model_file, std::ios::binary);
    out << builtin_model("lambda_fig5").to_json_string();
  }
  const ModelSpec loaded = resolve_model(model_file.string(), {});
  CHECK(loaded.excited_levels.size() == 1);
  CHECK(loaded.excited_levels[0].couplings(1) == doctest::Approx(0.7));
}

TEST_CASE("simulate on the single-level builtin matches the relaxation law") {
  TempDir tmp;
  ExperimentConfig config = base_config(tmp.path);
  config.params["beta"] = 1.0;
  CHECK(run_experiment(config) == 0);

  const std::string csv = slurp(tmp.path / "trajectory.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,variant,trace,sx,sy,sz");
  int exact_rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string t_str, variant, trace_str;
    std::getline(cells, t_str, ',');
    std::getline(cells, variant, ',');
    std::getline(cells, trace_str, ',');
    if (variant != "exact") continue;
    ++exact_rows;
    const double t = std::stod(t_str);
    const double trace = std::stod(trace_str);
    CHECK(std::abs(trace - adel::testing::single_level_law(1.0, t)) < 1e-8);
  }
  CHECK(exact_rows == 41);

  // Manifest is present, parses, and records the resolved parameters.
  const std::string manifest = slurp(tmp.path / "run-manifest.json");
  CHECK(manifest.find("\"task\": \"simulate\"") != std::string::npos);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("\"numeric_policy\"") != std::string::npos);
}

TEST_CASE("byte-identical reruns") {
  TempDir tmp_a, tmp_b;
  ExperimentConfig config = base_config(tmp_a.path);
  config.model_ref = "builtin:fano_fig3";
  config.grid = GridSpec{0.0, 3.0, 16};
  CHECK(run_experiment(config) == 0);
  config.out_dir = tmp_b.path;
  CHECK(run_experiment(config) == 0);
  CHECK(slurp(tmp_a.path / "trajectory.csv") == slurp(tmp_b.path / "trajectory.csv"));
}

TEST_CASE("parallel sweeps are deterministic") {
  TempDir tmp_serial, tmp_parallel;
  ExperimentConfig config = base_config(tmp_serial.path);
  config.task = "sweep";
  config.model_ref = "builtin:fig7";
  config.grid = GridSpec{1.0, 30.0, 4};
  config.threads = 1;
  CHECK(run_experiment(config) == 0);
  config.out_dir = tmp_parallel.path;
  config.threads = 4;
  CHECK(run_experiment(config) == 0);
  CHECK(slurp(tmp_serial.path / "sweep.csv") == slurp(tmp_parallel.path / "sweep.csv"));
}

TEST_CASE("effective task reports the generator data") {
  TempDir tmp;
  ExperimentConfig config = base_config(tmp.path);
  config.task = "effective";
  config.model_ref = "builtin:lambda_fig5";
  CHECK(run_experiment(config) == 0);
  const std::string text = slurp(tmp.path / "effective.json");
  CHECK(text.find("\"alpha\"") != std::string::npos);
  CHECK(text.find("\"l0\"") != std::string::npos);
  CHECK(text.find("\"trace_preserving\"") != std::string::npos);
}

TEST_CASE("spectrum task labels linear and nonlinear sources") {
  TempDir tmp;
  ExperimentConfig config = base_config(tmp.path);
  config.task = "spectrum";
  config.model_ref = "builtin:fano_fig3";
  CHECK(run_experiment(config) == 0);
  const std::string csv = slurp(tmp.path / "spectrum.csv");
  CHECK(csv.find("re,im,source") != std::string::npos);
  CHECK(csv.find("L0") != std::string::npos);
  CHECK(csv.find("Leff") != std::string::npos);
}

TEST_CASE("steady task emits populations for exact and rescaled states") {
  TempDir tmp;
  ExperimentConfig config = base_config(tmp.path);
  config.task = "steady";
  config.model_ref = "builtin:lambda_fig6";
  CHECK(run_experiment(config) == 0);
  const std::string csv = slurp(tmp.path / "steady.csv");
  CHECK(csv.find("exact,0,") != std::string::npos);
  CHECK(csv.find("rescaled_l0,0,") != std::string::npos);
}

TEST_CASE("figure reproduction artifacts") {
  SUBCASE("fig2 emits one CSV per beta plus the two limit curves") {
    TempDir tmp;
    ExperimentConfig config = base_config(tmp.path);
    config.task = "figure";
    config.figure = "fig2";
    CHECK(run_experiment(config) == 0);
    for (const char* name :
         {"fig2_beta_0.1.csv", "fig2_beta_1.csv", "fig2_beta_10.csv", "fig2_beta_inf.csv",
          "fig2_beta_0.csv"}) {
      CHECK(fs::exists(tmp.path / name));
    }
  }
  SUBCASE("fig9 sweep columns") {
    TempDir tmp;
    ExperimentConfig config = base_config(tmp.path);
    config.task = "figure";
    config.figure = "fig9";
    config.threads = 4;
    CHECK(run_experiment(config) == 0);
    const std::string csv = slurp(tmp.path / "fig9.csv");
    CHECK(csv.rfind("detuning,model,rho_g1g1,rho_g2g2,rho_e1e1", 0) == 0);
    CHECK(csv.find("exact") != std::string::npos);
    CHECK(csv.find("l0_unscaled") != std::string::npos);
    CHECK(csv.find("fano") != std::string::npos);
  }
  SUBCASE("unknown figure is rejected") {
    TempDir tmp;
    ExperimentConfig config = base_config(tmp.path);
    config.task = "figure";
    config.figure = "fig1";
    CHECK_THROWS_AS(run_experiment(config), Error);
  }
}

TEST_CASE("thread budget honors the environment cap") {
  ::setenv("ADIABATIC_ELIM_THREADS", "3", 1);
  CHECK(thread_budget(0) == 3);
  CHECK(thread_budget(2) == 2);
  ::unsetenv("ADIABATIC_ELIM_THREADS");
  CHECK(thread_budget(5) == 5);
}

TEST_CASE("float formatting is locale-independent and 17 significant digits") {
  CHECK(format_float(1.0) == "1");
  CHECK(format_float(0.1) == "0.10000000000000001");
  CHECK(format_float(-2.5e-300) == "-2.5e-300");
  CHECK(format_float(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("model schema is valid JSON and versioned") {
  const std::string schema = model_schema_json();
  CHECK(schema.find("\"schema_version\"") != std::string::npos);
  CHECK_NOTHROW((void)ModelSpec::from_json_string(
      builtin_model("fano_fig3").to_json_string()));
}
