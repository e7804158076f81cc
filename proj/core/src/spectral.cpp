// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include "adel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace adel {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat t_of(const EffectiveFamily& fam, Complex z) {
  const int d = fam.slow_dim();
  return z * Mat::Identity(d, d) - fam.eval(z);
}

Mat t_prime_of(const EffectiveFamily& fam, Complex z) {
  const int d = fam.slow_dim();
  return Mat::Identity(d, d) - fam.deriv(z);
}

double pole_distance(const EffectiveFamily& fam, Complex z) {
  double best = std::numeric_limits<double>::infinity();
  for (Complex p : fam.poles()) {
    best = std::min(best, std::abs(z - p));
  }
  return best;
}

/// Two-sided Rayleigh-functional Newton iteration on (lambda, v, w), then the
/// Keldysh normalization. Returns nullopt when the residual test fails.
std::optional<NonlinearEigenpair> refine_pair(const EffectiveFamily& fam, Complex lambda,
                                              double scale) {
  const auto& policy = numeric_policy();
  Vec v, w;
  for (int it = 0; it < 30; ++it) {
    if (pole_distance(fam, lambda) < 1e-12 * std::max(scale, 1.0)) {
      return std::nullopt;  // walked into a pole; spurious root
    }
    const Mat t = t_of(fam, lambda);
    Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    v = svd.matrixV().col(t.cols() - 1);
    w = svd.matrixU().col(t.cols() - 1);
    const Mat tp = t_prime_of(fam, lambda);
    const Complex denom = (w.adjoint() * tp * v)(0);
    if (std::abs(denom) < 1e-14) {
      return std::nullopt;  // T'(lambda) v in ran T(lambda): not simple
    }
    const Complex step = (w.adjoint() * t * v)(0) / denom;
    lambda -= step;
    if (std::abs(step) < 1e-15 * std::max(scale, 1.0)) break;
  }

  const Mat t = t_of(fam, lambda);
  Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  v = svd.matrixV().col(t.cols() - 1);
  w = svd.matrixU().col(t.cols() - 1);
  if ((t * v).norm() > policy.eig_residual_tol * v.norm() ||
      (w.adjoint() * t).norm() > policy.eig_residual_tol * w.norm()) {
    return std::nullopt;
  }

  const Complex s = (w.adjoint() * t_prime_of(fam, lambda) * v)(0);
  if (std::abs(s) < 1e-14) {
    return std::nullopt;
  }
  NonlinearEigenpair pair;
  pair.lambda = lambda;
  pair.right = v / s;  // folds the normalization into the right vector
  pair.left = w;
  pair.normalized = true;
  pair.near_pole = pole_distance(fam, lambda) < numeric_policy().pole_distance_warn;
  return pair;
}

std::vector<NonlinearEigenpair> finalize_set(const EffectiveFamily& fam,
                                             std::vector<Complex> candidates, double scale) {
  std::sort(candidates.begin(), candidates.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  std::vector<NonlinearEigenpair> out;
  for (Complex lambda : candidates) {
    auto pair = refine_pair(fam, lambda, scale);
    if (!pair) continue;
    bool duplicate = false;
    for (const auto& kept : out) {
      const double dist = std::abs(kept.lambda - pair->lambda);
      if (dist < 1e-11 * std::max(scale, 1.0)) {
        duplicate = true;  // same root reached twice
        break;
      }
      if (dist < numeric_policy().eig_cluster_tol * std::max(scale, 1.0)) {
        throw DegenerateEigenvalueError(
            "nonlinear eigenvalues cluster within tolerance; non-simple spectra are out of "
            "scope");
      }
    }
    if (!duplicate) out.push_back(std::move(*pair));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

}  // namespace

ContourSpec default_contour(const EffectiveFamily& family) {
  // Circle enclosing roughly [-2.2 s, +0.2 s] on the real axis, where the
  // scale s combines the largest pole magnitude with the L0 spectral radius;
  // either alone can miss eigenvalues when dissipation and coupling rates
  // are very different.
  double scale = 0;
  for (Complex p : family.poles()) {
    scale = std::max(scale, std::abs(p));
  }
  Eigen::ComplexEigenSolver<Mat> eig(family.l0_matrix(), false);
  if (eig.eigenvalues().size() > 0) {
    scale += eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (scale == 0) scale = 1;
  ContourSpec spec;
  spec.center = Complex(-scale, 0);
  spec.radius = 1.2 * scale;
  return spec;
}

std::vector<NonlinearEigenpair> nonlinear_eigs_contour(const EffectiveFamily& family,
                                                       const ContourSpec& contour) {
  const int d = family.slow_dim();
  const int probe = contour.probe_dim > 0 ? contour.probe_dim : d;
  const int nq = contour.quadrature_points;
  if (probe > d) {
    throw Error("nonlinear_eigs_contour: probe dimension exceeds slow dimension");
  }
  if (nq < 8) {
    throw Error("nonlinear_eigs_contour: too few quadrature points");
  }

  std::mt19937 rng(contour.seed);
  std::normal_distribution<double> gauss;
  Mat probe_mat(d, probe);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < probe; ++j) {
      probe_mat(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  probe_mat = Eigen::HouseholderQR<Mat>(probe_mat).householderQ() * Mat::Identity(d, probe);

  // Trapezoidal moments A_p in the scaled variable (z - c)/r; the rule is
  // exponentially convergent for integrands analytic near the circle. A
  // nonlinear problem can hold more eigenvalues inside the contour than the
  // space dimension, so the block-Hankel (higher moment) variant of the
  // integral method is used with an adaptively grown moment count.
  constexpr int k_max = 6;
  std::vector<Mat> moments(2 * k_max, Mat::Zero(d, probe));
  for (int k = 0; k < nq; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nq;
    const Complex phase = std::polar(1.0, theta);
    const Complex z = contour.center + contour.radius * phase;
    const Mat t = t_of(family, z);
    Eigen::PartialPivLU<Mat> lu(t);
    const Mat solved = lu.solve(probe_mat);
    if (!solved.allFinite()) {
      throw Error("nonlinear_eigs_contour: quadrature node hit a pole or eigenvalue");
    }
    Complex weight = phase;
    for (int p = 0; p < 2 * k_max; ++p) {
      moments[p] += weight * solved;
      weight *= phase;
    }
  }
  for (auto& m : moments) m /= nq;

  const double scale = std::abs(contour.center) + contour.radius;
  for (int hankel = 1; hankel <= k_max; ++hankel) {
    Mat b0 = Mat::Zero(hankel * d, hankel * probe);
    Mat b1 = Mat::Zero(hankel * d, hankel * probe);
    for (int row = 0; row < hankel; ++row) {
      for (int col = 0; col < hankel; ++col) {
        b0.block(row * d, col * probe, d, probe) = moments[row + col];
        b1.block(row * d, col * probe, d, probe) = moments[row + col + 1];
      }
    }
    Eigen::JacobiSVD<Mat> svd(b0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = numeric_policy().contour_rank_rel_cutoff * (sv.size() ? sv(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) ++rank;
    }
    if (rank == 0) return {};
    if (rank == hankel * probe) {
      if (hankel < k_max) continue;  // moment space saturated; add moments
      throw Error(
          "nonlinear_eigs_contour: probing subspace too small for the enclosed eigenvalue "
          "count; increase probe dimension");
    }
    const Mat u0 = svd.matrixU().leftCols(rank);
    const Mat w0 = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd s0 = sv.head(rank);
    const Mat reduced = u0.adjoint() * b1 * w0 * s0.cwiseInverse().asDiagonal();

    Eigen::ComplexEigenSolver<Mat> eig(reduced, false);
    std::vector<Complex> candidates;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      const Complex mu = eig.eigenvalues()(i);
      if (std::abs(mu) <= 1.0 + 1e-8) {
        candidates.push_back(contour.center + contour.radius * mu);
      }
    }
    return finalize_set(family, candidates, scale);
  }
  throw Error("nonlinear_eigs_contour: moment growth failed");  // unreachable
}

std::vector<NonlinearEigenpair> nonlinear_eigs_rational(const EffectiveFamily& family) {
  const auto spf = family.single_pole_form();
  if (!spf) {
    throw UnsupportedFormError(
        "nonlinear_eigs_rational: family is not affine in a single -z/(z+Gamma) pole term");
  }
  const int d = family.slow_dim();
  const double gamma = spf->gamma;
  // (z + Gamma)(z - A) + z B = 0  ->  z^2 + z (Gamma - A + B) - Gamma A = 0.
  const Mat m1 = gamma * Mat::Identity(d, d) - spf->a + spf->b;
  const Mat m0 = -gamma * spf->a;
  Mat companion = Mat::Zero(2 * d, 2 * d);
  companion.topRightCorner(d, d).setIdentity();
  companion.bottomLeftCorner(d, d) = -m0;
  companion.bottomRightCorner(d, d) = -m1;

  Eigen::ComplexEigenSolver<Mat> eig(companion, false);
  std::vector<Complex> candidates;
  double scale = gamma;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const Complex z = eig.eigenvalues()(i);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
    scale = std::max(scale, std::abs(z));
    // Linearization plants spurious roots at the pole itself.
    if (std::abs(z + gamma) < 1e-7 * std::max(gamma, 1.0)) continue;
    candidates.push_back(z);
  }
  return finalize_set(family, candidates, scale);
}

Eigen::VectorXcd keldysh_propagate(const std::vector<NonlinearEigenpair>& pairs,
                                   const Eigen::VectorXcd& rho0, double t) {
  if (pairs.empty()) {
    throw Error("keldysh_propagate: empty eigenpair set");
  }
  Vec acc = Vec::Zero(rho0.size());
  for (const auto& pair : pairs) {
    if (!pair.normalized) {
      throw Error("keldysh_propagate: eigenpairs must be Keldysh-normalized");
    }
    if (pair.right.size() != rho0.size()) {
      throw DimensionError("keldysh_propagate: state dimension mismatch");
    }
    acc += std::exp(pair.lambda * t) * pair.right * (pair.left.adjoint() * rho0)(0);
  }
  return acc;
}

double spectral_gap(const std::vector<NonlinearEigenpair>& pairs, bool* steady_missing) {
  if (pairs.empty()) {
    throw Error("spectral_gap: empty eigenvalue set");
  }
  double scale = 0;
  for (const auto& p : pairs) scale = std::max(scale, std::abs(p.lambda));
  const double zero_tol = 1e-8 * std::max(scale, 1.0);
  bool found_steady = false;
  bool found_nonzero = false;
  double gap = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    if (std::abs(p.lambda) <= zero_tol) {
      found_steady = true;
    } else {
      found_nonzero = true;
      gap = std::max(gap, p.lambda.real());
    }
  }
  if (steady_missing) *steady_missing = !found_steady;
  if (!found_nonzero) {
    throw Error("spectral_gap: no nonzero eigenvalues in the set");
  }
  return gap;
}

}  // namespace adel
