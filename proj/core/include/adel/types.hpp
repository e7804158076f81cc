// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace adel {

using Complex = std::complex<double>;

/// Dense operator on the Hilbert space (Hamiltonians, jump operators,
/// density matrices, projectors). Energies and rates are in units of the
/// reference coupling, times in its inverse.
using Operator = Eigen::MatrixXcd;

/// Column-stacked density matrix: entry rho(a, b) lives at index b*N + a.
using StateVec = Eigen::VectorXcd;

/// Dense N^2 x N^2 matrix acting on StateVec.
using SuperOp = Eigen::MatrixXcd;

using RealVec = Eigen::VectorXd;

/// Project-wide tolerances. All modules read the mutable global instance
/// returned by numeric_policy(); tests that tighten or loosen a knob are
/// expected to restore it.
struct NumericPolicy {
  double hermiticity_tol = 1e-12;   // max-norm, absolute
  double projector_tol = 1e-12;     // idempotence / Hermiticity of P
  double kernel_rel_cutoff = 1e-9;  // singular values below cutoff*sigma_max span the kernel
  double contour_rank_rel_cutoff = 1e-10;
  double eig_residual_tol = 1e-8;   // ||T(lambda) v|| <= tol * ||v||
  double eig_cluster_tol = 1e-8;    // closer nonlinear eigenvalues count as degenerate
  double pole_distance_warn = 1e-6;
  double psd_clip = 1e-9;           // eigenvalues in [-clip, 0) are treated as 0
  double fd_step = 1e-5;            // central-difference step for derivative checks
  double trace_preserve_tol = 1e-10;
  double cpt_tol = 1e-10;
};

NumericPolicy& numeric_policy();

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  using Error::Error;
};

/// z hit (or nearly hit) the spectrum of the restricted fast block.
struct ResolventPoleError : Error {
  ResolventPoleError(const std::string& what, Complex nearest)
      : Error(what), nearest_eigenvalue(nearest) {}
  Complex nearest_eigenvalue;
};

/// ker(L0) is not one dimensional; the trace correction is undefined.
struct DegenerateKernelError : Error {
  DegenerateKernelError(const std::string& what, int dim) : Error(what), kernel_dim(dim) {}
  int kernel_dim;
};

struct DegenerateEigenvalueError : Error {
  using Error::Error;
};

struct UnsupportedFormError : Error {
  using Error::Error;
};

}  // namespace adel
