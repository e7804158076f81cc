// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adel/runner.hpp"
#include "adel/version.hpp"

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> params;
  for (const auto& entry : raw) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw adel::Error("--param expects key=value, got '" + entry + "'");
    }
    try {
      params[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    } catch (const std::exception&) {
      throw adel::Error("--param value is not a number in '" + entry + "'");
    }
  }
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective slow-subspace generators for Lindblad dynamics"};
  app.set_version_flag("--version", std::string(adel::kVersion));
  app.require_subcommand(1);

  std::string model = "builtin:fano_fig3";
  std::string out_dir = "out";
  std::string grid = "0:10:101";
  std::string figure_name;
  std::vector<std::string> raw_params;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_model) {
    if (needs_model) {
      cmd->add_option("--model", model, "Model JSON file or builtin:<name>");
    }
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--grid", grid, "Grid t0:t1:n (time, or sweep parameter)");
    cmd->add_option("--param", raw_params, "Model parameter override key=value");
    cmd->add_option("--threads", threads, "Worker cap (default: ADIABATIC_ELIM_THREADS)");
  };

  for (const char* task : {"simulate", "effective", "spectrum", "steady", "sweep"}) {
    add_common(app.add_subcommand(task), true);
  }
  auto* fig = app.add_subcommand("figure", "Reproduce the data behind a published figure");
  fig->add_option("name", figure_name, "fig2|fig3|fig5|fig6|fig7|fig8|fig9")->required();
  add_common(fig, false);
  auto* schema = app.add_subcommand("schema", "Print the model JSON schema");
  auto* builtins = app.add_subcommand("builtins", "List builtin model names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema->parsed()) {
      std::cout << adel::model_schema_json();
      return 0;
    }
    if (builtins->parsed()) {
      for (const auto& name : adel::builtin_model_names()) std::cout << name << "\n";
      return 0;
    }
    adel::ExperimentConfig config;
    config.task = app.get_subcommands().front()->get_name();
    config.model_ref = model;
    config.figure = figure_name;
    config.out_dir = out_dir;
    config.grid = adel::GridSpec::parse(grid);
    config.params = parse_params(raw_params);
    config.threads = threads;
    return adel::run_experiment(config);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
