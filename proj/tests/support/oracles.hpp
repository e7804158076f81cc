// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles. Everything here is deliberately independent of the
// library code paths it is used to check: direct matrix-form products,
// dense inverses, finite differences, and numerical inverse Laplace.

#pragma once

#include <random>

#include "adel/effective.hpp"
#include "adel/types.hpp"

namespace adel::testing {

using Rng = std::mt19937;

Operator random_matrix(int n, Rng& rng);
Operator random_hermitian(int n, Rng& rng);
Operator random_density(int n, Rng& rng);  // Hermitian, PSD, trace one

struct RandomLindblad {
  Operator h;
  std::vector<Operator> jumps;
  SuperOp l;
};
RandomLindblad random_lindblad(int n, int n_jumps, Rng& rng);

/// A rho B^dag, computed directly in matrix form.
Operator apply_sandwich_direct(const Operator& a, const Operator& b, const Operator& rho);

/// F rho F^dag - 1/2 {F^dag F, rho}, computed directly in matrix form.
Operator apply_dissipator_direct(const Operator& f, const Operator& rho);

/// Central finite difference of L_eff at z = 0 with the project step.
Eigen::MatrixXcd fd_derivative_at_zero(const EffectiveFamily& family, double h = 1e-5);

/// Fixed-Talbot numerical inversion of the slow-sector Laplace transform
/// [z - L_eff(z)]^{-1} rho0; an eigendecomposition-free reference for the
/// exact slow dynamics of a family.
Eigen::VectorXcd talbot_slow_evolution(const EffectiveFamily& family,
                                       const Eigen::VectorXcd& rho0, double t, int nodes = 28);

/// Truncated-line Bromwich quadrature of e^{zt} (z-L)^{-1} rho0 (with the
/// 1/z tail subtracted); coarse, used only as a consistency diagnostic.
StateVec bromwich_line_evolution(const SuperOp& l, const StateVec& rho0, double t, double a,
                                 double y_max, int nodes);

/// Relaxation law of the single-level continuum model in rescaled time.
double single_level_law(double beta, double tau);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace adel::testing
