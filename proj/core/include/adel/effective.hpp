// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "adel/types.hpp"

namespace adel {

/// Orthonormal bases for the slow (ran conj(P)(x)P) and fast (complement)
/// sectors of the vectorized space. When P is a 0/1 diagonal projector on the
/// leading block -- the project-wide basis ordering -- the slow basis is the
/// canonical unit vectors at indices b*N + a with a,b < dim P, so restricted
/// matrices are directly comparable to closed-form constructions.
class SlowFastSplit {
 public:
  static SlowFastSplit from_projector(const Operator& p);

  int full_dim() const { return static_cast<int>(bp_.rows()); }
  int slow_dim() const { return static_cast<int>(bp_.cols()); }
  int fast_dim() const { return static_cast<int>(bq_.cols()); }
  bool canonical() const { return canonical_; }
  const Operator& projector() const { return p_; }
  const Eigen::MatrixXcd& slow_basis() const { return bp_; }
  const Eigen::MatrixXcd& fast_basis() const { return bq_; }

  Eigen::VectorXcd restrict_slow(const StateVec& full) const { return bp_.adjoint() * full; }
  StateVec embed_slow(const Eigen::VectorXcd& slow) const { return bp_ * slow; }

  /// Row functional t with tr(represented operator) = t^dag * coords.
  Eigen::VectorXcd slow_trace_functional() const;

 private:
  Operator p_;
  Eigen::MatrixXcd bp_, bq_;
  bool canonical_ = false;
};

/// The blocks of a Lindblad generator in a slow/fast split, and the resolvent
/// machinery built on them. Pure value type; safe to share across threads.
class ProjectedLindblad {
 public:
  ProjectedLindblad(const SuperOp& l, const Operator& p);

  const SlowFastSplit& split() const { return split_; }
  const Eigen::MatrixXcd& pp() const { return pp_; }
  const Eigen::MatrixXcd& pq() const { return pq_; }
  const Eigen::MatrixXcd& qp() const { return qp_; }
  const Eigen::MatrixXcd& qq() const { return qq_; }

  /// L_eff(z) = PLP + PLQ (z - QLQ)^{-1} QLP on the slow basis.
  Eigen::MatrixXcd leff_at(Complex z) const;

  /// dL_eff/dz = -PLQ (z - QLQ)^{-2} QLP.
  Eigen::MatrixXcd leff_deriv_at(Complex z) const;

  struct SchurResult {
    Eigen::MatrixXcd l0;
    Eigen::MatrixXcd l1;
    bool pseudoinverse_used = false;  // QLQ restricted block was singular
  };
  SchurResult l0_l1() const;

  /// Eigenvalues of the restricted fast block (the poles of the resolvent).
  std::vector<Complex> fast_eigenvalues() const;

 private:
  SlowFastSplit split_;
  Eigen::MatrixXcd pp_, pq_, qp_, qq_;
};

Eigen::MatrixXcd leff_at(const SuperOp& l, const Operator& p, Complex z);
Eigen::MatrixXcd l0(const SuperOp& l, const Operator& p, bool* pseudoinverse_used = nullptr);
Eigen::MatrixXcd l1(const SuperOp& l, const Operator& p, bool* pseudoinverse_used = nullptr);

/// Truncated Neumann series L_D^{-1} sum_{n<=order} (W L_D^{-1})^n for the
/// inverse of L_D + W. Sets *may_diverge when the contraction-norm estimate
/// of W L_D^{-1} is >= 1.
Eigen::MatrixXcd perturbative_inverse(const Eigen::MatrixXcd& ld, const Eigen::MatrixXcd& w,
                                      int order, bool* may_diverge = nullptr);

struct LdwSplit {
  Eigen::MatrixXcd ld;  // diagonal in the product eigenbasis of PHP and QHQ
  Eigen::MatrixXcd w;   // Hamiltonian couplings PHQ + QHP only
  double max_offdiag_ld = 0;  // diagnostic: departure of ld from diagonality
};

/// Split QLQ = L_D + W per the non-Hermitian-Hamiltonian construction: W is
/// -i Q(1 (x) V - conj(V) (x) 1) Q with V = PHQ + QHP, and L_D is the rest.
/// Assumes dissipation between fast states is negligible and H0 = PHP + QHQ
/// is diagonal in the supplied basis ordering.
LdwSplit build_ld_w(const SuperOp& l, const Operator& h, const Operator& p);

/// A z-dependent effective generator on the slow sector, with analytic
/// derivative access. Immutable after construction.
class EffectiveFamily {
 public:
  enum class Source { exact_schur, perturbative, closed_form };

  virtual ~EffectiveFamily() = default;

  virtual int slow_dim() const = 0;                 // (dim P)^2
  virtual Eigen::MatrixXcd eval(Complex z) const = 0;
  virtual Eigen::MatrixXcd deriv(Complex z) const = 0;
  virtual Eigen::MatrixXcd l0_matrix() const { return eval(Complex(0, 0)); }
  virtual Eigen::MatrixXcd l1_matrix() const { return deriv(Complex(0, 0)); }
  virtual std::vector<Complex> poles() const = 0;
  virtual Source source() const = 0;

  /// Trace functional on slow coordinates.
  virtual Eigen::VectorXcd trace_functional() const;

  /// Present when L_eff(z) = A - z/(z + gamma) B with a single pole.
  struct SinglePoleForm {
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd b;
    double gamma = 0;  // pole at z = -gamma
  };
  virtual std::optional<SinglePoleForm> single_pole_form() const { return std::nullopt; }
};

/// Family backed by the exact resolvent of a full generator (Schur route).
class SchurFamily final : public EffectiveFamily {
 public:
  SchurFamily(const SuperOp& l, const Operator& p);

  int slow_dim() const override { return blocks_.split().slow_dim(); }
  Eigen::MatrixXcd eval(Complex z) const override { return blocks_.leff_at(z); }
  Eigen::MatrixXcd deriv(Complex z) const override { return blocks_.leff_deriv_at(z); }
  Eigen::MatrixXcd l0_matrix() const override { return schur_.l0; }
  Eigen::MatrixXcd l1_matrix() const override { return schur_.l1; }
  std::vector<Complex> poles() const override { return blocks_.fast_eigenvalues(); }
  Source source() const override { return Source::exact_schur; }
  Eigen::VectorXcd trace_functional() const override;
  bool pseudoinverse_used() const { return schur_.pseudoinverse_used; }
  const ProjectedLindblad& blocks() const { return blocks_; }

 private:
  ProjectedLindblad blocks_;
  ProjectedLindblad::SchurResult schur_;
};

/// Family evaluating the fast resolvent by the truncated Neumann series in
/// W (z - L_D)^{-1}; valid in the strong-dissipation regime.
class PerturbativeFamily final : public EffectiveFamily {
 public:
  PerturbativeFamily(const SuperOp& l, const Operator& h, const Operator& p, int order);

  int slow_dim() const override;
  Eigen::MatrixXcd eval(Complex z) const override;
  Eigen::MatrixXcd deriv(Complex z) const override;
  std::vector<Complex> poles() const override;
  Source source() const override { return Source::perturbative; }
  Eigen::VectorXcd trace_functional() const override;
  int order() const { return order_; }

 private:
  Eigen::MatrixXcd resolvent_series(Complex z, int deriv_order) const;

  SlowFastSplit split_;
  Eigen::MatrixXcd pp_, pq_, qp_;
  Eigen::MatrixXcd ld_, w_;
  int order_;
};

struct TraceCorrection {
  double alpha = 1;          // 1 / tr[(1 - L1) rho_bar]
  Eigen::VectorXcd rho_bar;  // trace-one kernel element of L0, slow coords
  int kernel_dim = 1;
  Complex l1_expectation;    // tr(L1 rho_bar)
};

/// Kernel extraction and the trace-correction factor. Throws
/// DegenerateKernelError when ker(L0) is not one dimensional.
TraceCorrection trace_correction(const EffectiveFamily& family);

/// alpha e^{L0 t} rho0 on slow coordinates. The trace at t = 0 is alpha by
/// construction; the map is intentionally not trace preserving.
Eigen::VectorXcd corrected_evolution(const EffectiveFamily& family, const Eigen::VectorXcd& rho0,
                                     double t);

struct TracePreservationReport {
  double left_trace_residual = 0;  // || vec(P)^dag L0 || / ||L0||
  bool range_inclusion = false;    // ran[QLP] subset of ran[QLQ]
  int rank_qq = 0;
  int rank_augmented = 0;
};

TracePreservationReport trace_preserving_check(const SuperOp& l, const Operator& p);

/// Diagnostic for the conditional complete positivity of L0: smallest
/// eigenvalue of the Choi-type matrix of the dissipative part (projected off
/// the Hamiltonian component). Nonnegative-within-tolerance indicates L0 is
/// of Lindblad form; no guarantee is implied.
double lindblad_form_defect(const Eigen::MatrixXcd& l0_matrix);

}  // namespace adel
