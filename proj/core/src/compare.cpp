// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include "adel/compare.hpp"

#include "adel/spectral.hpp"
#include "adel/superop.hpp"

namespace adel {

EvolutionComparison compare_evolutions(const ModelSpec& spec, const StateVec& rho0_slow,
                                       const std::vector<double>& times) {
  spec.validate();
  const int ng = spec.n_ground();
  if (rho0_slow.size() != ng * ng) {
    throw DimensionError("compare_evolutions: initial state must live on the ground manifold");
  }
  const bool discrete = !spec.excited_levels.empty();
  if (discrete && !spec.continua.empty()) {
    throw Error("compare_evolutions: mixed discrete/continuum fast spaces are unsupported");
  }

  std::unique_ptr<EffectiveFamily> family;
  std::vector<StateVec> exact;
  if (discrete) {
    const SuperOp l = lambda_exact_generator(spec);
    const Operator p = ground_projector(spec);
    auto schur = std::make_unique<SchurFamily>(l, p);
    const auto& split = schur->blocks().split();
    const StateVec full0 = split.embed_slow(rho0_slow);
    for (double t : times) {
      exact.push_back(split.restrict_slow(expm_apply(l, t, full0)));
    }
    family = std::move(schur);
  } else {
    family = continuum_effective_family(spec);
  }

  std::vector<NonlinearEigenpair> pairs;
  if (family->single_pole_form()) {
    pairs = nonlinear_eigs_rational(*family);
  } else {
    pairs = nonlinear_eigs_contour(*family, default_contour(*family));
  }
  if (!discrete) {
    for (double t : times) {
      exact.push_back(keldysh_propagate(pairs, rho0_slow, t));
    }
  }

  const TraceCorrection tc = trace_correction(*family);
  const Eigen::MatrixXcd l0m = family->l0_matrix();

  EvolutionComparison out;
  out.times = times;
  out.alpha = tc.alpha;
  EvolutionComparison::Variant v_exact{"exact", exact, {}, {}};
  EvolutionComparison::Variant v_l0{"l0", {}, {}, {}};
  EvolutionComparison::Variant v_rescaled{"rescaled", {}, {}, {}};
  EvolutionComparison::Variant v_keldysh{"keldysh", {}, {}, {}};
  for (size_t i = 0; i < times.size(); ++i) {
    const StateVec bare = expm_apply(l0m, times[i], rho0_slow);
    v_l0.states.push_back(bare);
    v_rescaled.states.push_back(tc.alpha * bare);
    v_keldysh.states.push_back(keldysh_propagate(pairs, rho0_slow, times[i]));
  }
  for (auto* variant : {&v_exact, &v_l0, &v_rescaled, &v_keldysh}) {
    variant->observables.reserve(times.size());
    variant->fidelity_vs_exact.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
      variant->observables.push_back(compute_observables(variant->states[i]));
      // Approximate evolutions are not certified CP; project onto the PSD
      // cone before scoring so mild transient negativity reads as reduced
      // fidelity rather than an error.
      variant->fidelity_vs_exact.push_back(
          fidelity_rescaled(psd_clip_state(unvectorize(variant->states[i])),
                            psd_clip_state(unvectorize(exact[i]))));
    }
  }
  out.variants = {std::move(v_exact), std::move(v_l0), std::move(v_rescaled),
                  std::move(v_keldysh)};
  return out;
}

}  // namespace adel
