// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "adel/compare.hpp"
#include "adel/effective.hpp"
#include "adel/models.hpp"
#include "adel/propagation.hpp"
#include "adel/spectral.hpp"

namespace {

using namespace adel;

void BM_Expm(benchmark::State& state) {
  const ModelSpec spec = builtin_model("lambda_fig6");
  const SuperOp l = lambda_exact_generator(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expm((l * 2.5).eval()));
  }
}
BENCHMARK(BM_Expm);

void BM_LeffSolve(benchmark::State& state) {
  const ModelSpec spec = builtin_model("lambda_fig5");
  const ProjectedLindblad blocks(lambda_exact_generator(spec), ground_projector(spec));
  Complex z(0.1, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(blocks.leff_at(z));
    z += Complex(1e-9, 0);  // defeat value caching
  }
}
BENCHMARK(BM_LeffSolve);

void BM_ContourEigs(benchmark::State& state) {
  const ModelSpec spec = builtin_model("fano_fig3");
  const auto family = continuum_effective_family(spec);
  const ContourSpec contour = default_contour(*family);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nonlinear_eigs_contour(*family, contour));
  }
}
BENCHMARK(BM_ContourEigs);

void BM_OracleRhs(benchmark::State& state) {
  const ModelSpec spec = builtin_model("fano_fig3");
  const auto model = discretized_continuum_oracle(spec, static_cast<int>(state.range(0)), 500.0);
  Operator rho = Operator::Zero(model.total_dim(), model.total_dim());
  rho(0, 0) = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.rho_dot(rho));
  }
}
BENCHMARK(BM_OracleRhs)->Arg(51)->Arg(201);

}  // namespace

BENCHMARK_MAIN();
