// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include "adel/propagation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "adel/detail/rk45.hpp"
#include "adel/superop.hpp"

namespace adel {

namespace {

using Mat = Eigen::MatrixXcd;

void pade_uv(const Mat& a, int order, Mat& u, Mat& v) {
  const Eigen::Index n = a.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat a2 = a * a;
  switch (order) {
    case 3: {
      const double b[] = {120, 60, 12, 1};
      u = a * (b[3] * a2 + b[1] * id);
      v = b[2] * a2 + b[0] * id;
      return;
    }
    case 5: {
      const double b[] = {30240, 15120, 3360, 420, 30, 1};
      const Mat a4 = a2 * a2;
      u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[4] * a4 + b[2] * a2 + b[0] * id;
      return;
    }
    case 7: {
      const double b[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
      const Mat a4 = a2 * a2;
      const Mat a6 = a4 * a2;
      u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      return;
    }
    case 9: {
      const double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                          2162160.0,     110880.0,     3960.0,       90.0,        1.0};
      const Mat a4 = a2 * a2;
      const Mat a6 = a4 * a2;
      const Mat a8 = a6 * a2;
      u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      return;
    }
    case 13: {
      const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                          1187353796428800.0,  129060195264000.0,   10559470521600.0,
                          670442572800.0,      33522128640.0,       1323241920.0,
                          40840800.0,          960960.0,            16380.0,
                          182.0,               1.0};
      const Mat a4 = a2 * a2;
      const Mat a6 = a4 * a2;
      u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
               b[1] * id);
      v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
          b[0] * id;
      return;
    }
    default:
      throw Error("pade_uv: unsupported order");
  }
}

}  // namespace

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("expm: matrix must be square");
  }
  if (!a.allFinite()) {
    throw Error("expm: non-finite entries");
  }
  // Pade order thresholds on the 1-norm, Higham (2005).
  const double theta3 = 1.495585217958292e-2;
  const double theta5 = 2.539398330063230e-1;
  const double theta7 = 9.504178996162932e-1;
  const double theta9 = 2.097847961257068e0;
  const double theta13 = 5.371920351148152e0;

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // induced 1-norm
  Mat u, v;
  int squarings = 0;
  if (norm <= theta3) {
    pade_uv(a, 3, u, v);
  } else if (norm <= theta5) {
    pade_uv(a, 5, u, v);
  } else if (norm <= theta7) {
    pade_uv(a, 7, u, v);
  } else if (norm <= theta9) {
    pade_uv(a, 9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const Mat scaled = a / std::pow(2.0, squarings);
    pade_uv(scaled, 13, u, v);
  }
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    r = r * r;
  }
  return r;
}

StateVec expm_apply(const SuperOp& l, double t, const StateVec& rho0) {
  if (t < 0) {
    throw Error("expm_apply: negative time");
  }
  if (!rho0.allFinite() || !l.allFinite() || !std::isfinite(t)) {
    throw Error("expm_apply: non-finite input");
  }
  if (l.rows() != l.cols() || l.cols() != rho0.size()) {
    throw DimensionError("expm_apply: dimension mismatch");
  }
  if (t == 0) return rho0;
  return expm((l * t).eval()) * rho0;
}

StateVec ode_propagate(const SuperOp& l, double t, const StateVec& rho0, double rtol,
                       double atol) {
  if (t < 0) {
    throw Error("ode_propagate: negative time");
  }
  if (t == 0) return rho0;
  const Eigen::Index n = l.rows();
  Eigen::MatrixXd big(2 * n, 2 * n);
  big.topLeftCorner(n, n) = l.real();
  big.topRightCorner(n, n) = -l.imag();
  big.bottomLeftCorner(n, n) = l.imag();
  big.bottomRightCorner(n, n) = l.real();
  Eigen::VectorXd y(2 * n);
  y.head(n) = rho0.real();
  y.tail(n) = rho0.imag();
  const auto rhs = [&big](const Eigen::VectorXd& x) -> Eigen::VectorXd { return big * x; };
  y = detail::rk45_integrate(rhs, y, 0.0, t, rtol, atol);
  StateVec out(n);
  out.real() = y.head(n);
  out.imag() = y.tail(n);
  return out;
}

StateVec resolvent_apply(const SuperOp& l, Complex z, const StateVec& rho0) {
  if (l.rows() != l.cols() || l.cols() != rho0.size()) {
    throw DimensionError("resolvent_apply: dimension mismatch");
  }
  const Eigen::Index n = l.rows();
  const Mat sys = z * Mat::Identity(n, n) - l;
  Eigen::FullPivLU<Mat> lu(sys);
  if (!lu.isInvertible()) {
    Eigen::ComplexEigenSolver<Mat> eig(l, false);
    Complex nearest = eig.eigenvalues()(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(eig.eigenvalues()(i) - z) < std::abs(nearest - z)) {
        nearest = eig.eigenvalues()(i);
      }
    }
    throw ResolventPoleError("resolvent_apply: z is in the spectrum of L", nearest);
  }
  return lu.solve(rho0);
}

StateVec steady_state_exact(const SuperOp& l) {
  const Eigen::Index n2 = l.rows();
  Eigen::JacobiSVD<Mat> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = numeric_policy().kernel_rel_cutoff * sv(0);
  int kernel_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) ++kernel_dim;
  }
  if (kernel_dim != 1) {
    throw DegenerateKernelError("steady_state_exact: kernel dimension is not one", kernel_dim);
  }
  StateVec v = svd.matrixV().col(n2 - 1);
  const Complex tr = trace_of_vec(v);
  if (std::abs(tr) < 1e-10) {
    throw Error("steady_state_exact: kernel element is traceless (non-physical)");
  }
  v /= tr;
  Operator rho = unvectorize(v);
  rho = 0.5 * (rho + rho.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  if (es.eigenvalues().minCoeff() < -numeric_policy().psd_clip) {
    throw Error("steady_state_exact: kernel element is not positive semidefinite");
  }
  return vectorize(rho);
}

namespace {

Operator hermitian_sqrt(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -numeric_policy().psd_clip) {
      throw Error("fidelity_rescaled: input is significantly non-PSD");
    }
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity_rescaled(const Operator& rho, const Operator& rho_exact) {
  if (rho.rows() != rho_exact.rows() || rho.cols() != rho_exact.cols()) {
    throw DimensionError("fidelity_rescaled: dimension mismatch");
  }
  const double tol = 1e-8;
  if (hermiticity_defect(rho) > tol || hermiticity_defect(rho_exact) > tol) {
    throw Error("fidelity_rescaled: inputs must be Hermitian");
  }
  const double tr_a = rho.trace().real();
  const double tr_b = rho_exact.trace().real();
  if (tr_a <= 0 || tr_b <= 0) {
    throw Error("fidelity_rescaled: states must have positive trace");
  }
  // hermitian_sqrt rejects eigenvalues below the PSD clip; running it on both
  // inputs enforces the positivity precondition even though only the square
  // root of rho_exact enters the formula.
  const Operator sqrt_a = hermitian_sqrt(0.5 * (rho + rho.adjoint().eval()));
  const Operator sqrt_b = hermitian_sqrt(0.5 * (rho_exact + rho_exact.adjoint().eval()));
  const Operator inner = sqrt_a * (sqrt_b * sqrt_b) * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Mat> es(inner);
  double root_sum = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    root_sum += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  const double uhlmann = root_sum * root_sum / (tr_a * tr_b);
  const double rescale = 1.0 - (tr_a - tr_b) * (tr_a - tr_b);
  return std::clamp(uhlmann * std::max(0.0, rescale), 0.0, 1.0);
}

double fidelity_rescaled(const StateVec& rho, const StateVec& rho_exact) {
  return fidelity_rescaled(unvectorize(rho), unvectorize(rho_exact));
}

Operator psd_clip_state(const Operator& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint().eval()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

SlowObservables compute_observables(const StateVec& state) {
  SlowObservables obs;
  const Operator rho = unvectorize(state);
  obs.trace = rho.trace();
  const Eigen::Index n = rho.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.populations.push_back(rho(i, i).real());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      obs.coherence_mags.push_back(std::abs(rho(i, j)));
    }
  }
  if (n == 2) {
    obs.sx = (rho * pauli_x()).trace().real();
    obs.sy = (rho * pauli_y()).trace().real();
    obs.sz = (rho * pauli_z()).trace().real();
  }
  return obs;
}

Trajectory propagate_on_grid(const SuperOp& l, const StateVec& rho0,
                             const std::vector<double>& times) {
  for (size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) {
      throw Error("propagate_on_grid: times must be strictly increasing");
    }
  }
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  for (double t : times) {
    traj.states.push_back(expm_apply(l, t, rho0));
    traj.observables.push_back(compute_observables(traj.states.back()));
  }
  return traj;
}

std::vector<double> linspace(double t0, double t1, int n) {
  if (n < 2 || t1 <= t0) {
    throw Error("linspace: need n >= 2 and t1 > t0");
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
  }
  return out;
}

}  // namespace adel
