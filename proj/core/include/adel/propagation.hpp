// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "adel/types.hpp"

namespace adel {

/// Matrix exponential by scaling-and-squaring with the order-13 Pade
/// approximant and 1-norm based scaling selection (Higham 2005).
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// e^{L t} rho0. t >= 0; non-finite inputs are rejected.
StateVec expm_apply(const SuperOp& l, double t, const StateVec& rho0);

/// Adaptive Dormand-Prince integration of d rho/dt = L rho on the
/// real-imaginary-split system. Exists as an independent cross-oracle for
/// expm_apply.
StateVec ode_propagate(const SuperOp& l, double t, const StateVec& rho0, double rtol = 1e-10,
                       double atol = 1e-13);

/// (z - L)^{-1} rho0 by direct solve. Throws ResolventPoleError when z is
/// (numerically) in the spectrum of L.
StateVec resolvent_apply(const SuperOp& l, Complex z, const StateVec& rho0);

/// Trace-one kernel element of L. Requires a one-dimensional kernel and a
/// physical (Hermitian, PSD within tolerance) kernel direction.
StateVec steady_state_exact(const SuperOp& l);

/// Uhlmann fidelity of the trace-normalized states, rescaled by
/// 1 - (tr rho - tr rho_exact)^2 to penalize a wrong asymptotic trace.
double fidelity_rescaled(const StateVec& rho, const StateVec& rho_exact);
double fidelity_rescaled(const Operator& rho, const Operator& rho_exact);

/// Hermitize and clip negative eigenvalues to zero without renormalizing.
/// Approximate slow evolutions are not certified completely positive, so
/// their states need this projection before a fidelity comparison.
Operator psd_clip_state(const Operator& rho);

/// Per-time observable record. sx/sy/sz are filled for 2-level states;
/// otherwise populations and the magnitudes of the pairwise coherences
/// (row-major upper triangle) are reported.
struct SlowObservables {
  Complex trace;
  std::optional<double> sx, sy, sz;
  std::vector<double> populations;
  std::vector<double> coherence_mags;
};

SlowObservables compute_observables(const StateVec& state);

struct Trajectory {
  std::vector<double> times;              // strictly increasing
  std::vector<StateVec> states;           // column-stacked density matrices
  std::vector<SlowObservables> observables;
};

/// Propagate rho0 under e^{L t} on a time grid; each point is computed from
/// t = 0 (not stepped), so grid points are independent.
Trajectory propagate_on_grid(const SuperOp& l, const StateVec& rho0,
                             const std::vector<double>& times);

std::vector<double> linspace(double t0, double t1, int n);

}  // namespace adel
