// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adel/models.hpp"

namespace adel {

struct GridSpec {
  double t0 = 0;
  double t1 = 10;
  int n = 101;

  static GridSpec parse(const std::string& text);  // "t0:t1:n"
  std::vector<double> points() const;
};

/// A fully resolved experiment: one task, one model, one output directory.
/// Every run drops a run-manifest.json with the resolved parameters,
/// tolerances and library version next to its CSV artifacts.
struct ExperimentConfig {
  std::string task;       // simulate | effective | spectrum | steady | sweep | figure
  std::string model_ref;  // builtin:<name> or a JSON file path
  std::string figure;     // for task == figure: fig2|fig3|fig5|fig6|fig7|fig8|fig9
  std::filesystem::path out_dir;
  GridSpec grid;
  std::map<std::string, double> params;
  NumericPolicy policy;  // applied for the duration of the run, recorded in the manifest
  int threads = 0;       // 0: ADIABATIC_ELIM_THREADS, then hardware concurrency
};

/// Executes the experiment; returns a process exit status (0 on success) and
/// writes deterministic artifacts (17 significant digits, LF endings).
int run_experiment(const ExperimentConfig& config);

ModelSpec resolve_model(const std::string& model_ref,
                        const std::map<std::string, double>& params);

/// The JSON schema of the ModelSpec interchange format, as shipped in
/// docs/model_schema.json.
std::string model_schema_json();

int thread_budget(int requested);
void parallel_for(int n, int threads, const std::function<void(int)>& body);

std::string format_float(double x);  // fixed 17-significant-digit formatting

}  // namespace adel
