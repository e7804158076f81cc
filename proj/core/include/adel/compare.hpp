// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "adel/models.hpp"
#include "adel/propagation.hpp"

namespace adel {

/// Side-by-side slow-sector evolutions (part of the propagation toolkit):
/// exact P e^{Lt} rho0, the trace-preserving e^{L0 t} rho0, the rescaled
/// alpha e^{L0 t} rho0, and the Keldysh eigenpair reconstruction. For pure
/// continuum models the exact reference is the Keldysh evaluation of the
/// closed-form family, which is exact in the wide-band limit.
struct EvolutionComparison {
  struct Variant {
    std::string name;
    std::vector<Eigen::VectorXcd> states;
    std::vector<SlowObservables> observables;
    std::vector<double> fidelity_vs_exact;
  };
  std::vector<double> times;
  std::vector<Variant> variants;  // exact, l0, rescaled, keldysh
  double alpha = 1;
};

EvolutionComparison compare_evolutions(const ModelSpec& spec, const StateVec& rho0_slow,
                                       const std::vector<double>& times);

}  // namespace adel
