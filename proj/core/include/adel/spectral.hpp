// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "adel/effective.hpp"
#include "adel/types.hpp"

namespace adel {

/// Simple nonlinear eigenpair of T(z) = z - L_eff(z). When normalized,
/// w^dag T'(lambda) v = 1 (the Keldysh normalization).
struct NonlinearEigenpair {
  Complex lambda;
  Eigen::VectorXcd right;
  Eigen::VectorXcd left;
  bool normalized = false;
  bool near_pole = false;  // lambda within tolerance of a pole of L_eff
};

struct ContourSpec {
  Complex center;
  double radius = 1;
  int quadrature_points = 64;
  int probe_dim = 0;       // 0: use the slow dimension
  std::uint32_t seed = 0x5eed1234;
};

/// Default contour for a family: a circle enclosing [-2 Gamma, 0] on the real
/// axis, where Gamma is the largest pole magnitude (falling back to the L0
/// spectral radius for pole-free families).
ContourSpec default_contour(const EffectiveFamily& family);

/// Beyn's integral method with trapezoidal quadrature on a circle, followed
/// by two-sided Newton refinement of every extracted eigenpair.
std::vector<NonlinearEigenpair> nonlinear_eigs_contour(const EffectiveFamily& family,
                                                       const ContourSpec& contour);

/// Companion linearization of the quadratic problem obtained from families
/// affine in -z/(z + Gamma). Spurious roots at the pole are filtered by the
/// post-refinement residual test.
std::vector<NonlinearEigenpair> nonlinear_eigs_rational(const EffectiveFamily& family);

/// P rho(t) = sum_n e^{lambda_n t} v_n w_n^dag rho(0). Pairs must be
/// normalized and the set complete for the family.
Eigen::VectorXcd keldysh_propagate(const std::vector<NonlinearEigenpair>& pairs,
                                   const Eigen::VectorXcd& rho0, double t);

/// Largest nonzero real part among the eigenvalues (a negative number; its
/// magnitude is the relaxation rate). Sets *steady_missing when no eigenvalue
/// is numerically zero.
double spectral_gap(const std::vector<NonlinearEigenpair>& pairs,
                    bool* steady_missing = nullptr);

}  // namespace adel
