// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

#include "adel/types.hpp"

namespace adel::detail {

// Dormand-Prince 5(4) embedded pair with elementwise error control.
// State must be an Eigen vector or matrix type over double or complex.
template <typename State, typename Rhs>
State rk45_integrate(const Rhs& rhs, State y, double t0, double t1, double rtol, double atol) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // 4th-order weights (b* row) for the error estimate.
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  if (t1 == t0) return y;
  if (t1 < t0) throw Error("rk45_integrate: backwards integration not supported");

  double t = t0;
  double h = (t1 - t0) / 100.0;
  State k1 = rhs(y);
  int rejected_in_a_row = 0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    const State k2 = rhs((y + h * a21 * k1).eval());
    const State k3 = rhs((y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = rhs((y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 = rhs((y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 = rhs((y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const State ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(ynew);
    const State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale =
        atol + rtol * std::max(y.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
    const double err = err_vec.cwiseAbs().maxCoeff() / scale;

    if (err <= 1.0 || h <= 1e-14 * (t1 - t0)) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 60) {
      throw Error("rk45_integrate: step size control failed to converge");
    }
    const double factor = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return y;
}

}  // namespace adel::detail
