// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include "adel/effective.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "adel/propagation.hpp"
#include "adel/superop.hpp"

namespace adel {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

int svd_rank(const Eigen::VectorXd& sv, double rel_cutoff) {
  if (sv.size() == 0) return 0;
  const double cutoff = rel_cutoff * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

Mat pseudo_inverse(const Mat& a, double rel_cutoff) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = rel_cutoff * (sv.size() ? sv(0) : 0.0);
  Eigen::VectorXd inv = sv;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    inv(i) = (sv(i) > cutoff) ? 1.0 / sv(i) : 0.0;
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

SlowFastSplit SlowFastSplit::from_projector(const Operator& p) {
  if (!is_projector(p, numeric_policy().projector_tol)) {
    throw Error("SlowFastSplit: input is not a Hermitian idempotent projector");
  }
  SlowFastSplit split;
  split.p_ = p;
  const Eigen::Index n = p.rows();
  const int np = static_cast<int>(std::llround(p.trace().real()));

  // Leading-block 0/1 projector? Then use canonical unit vectors so slow
  // matrices are plain column-stacked blocks.
  Operator block = Operator::Zero(n, n);
  block.topLeftCorner(np, np).setIdentity();
  split.canonical_ = (p - block).cwiseAbs().maxCoeff() <= numeric_policy().projector_tol;

  if (split.canonical_) {
    split.bp_ = Mat::Zero(n * n, static_cast<Eigen::Index>(np) * np);
    Eigen::Index col = 0;
    std::vector<bool> in_slow(n * n, false);
    for (Eigen::Index b = 0; b < np; ++b) {
      for (Eigen::Index a = 0; a < np; ++a) {
        split.bp_(b * n + a, col++) = 1.0;
        in_slow[b * n + a] = true;
      }
    }
    split.bq_ = Mat::Zero(n * n, n * n - static_cast<Eigen::Index>(np) * np);
    col = 0;
    for (Eigen::Index i = 0; i < n * n; ++i) {
      if (!in_slow[i]) split.bq_(i, col++) = 1.0;
    }
  } else {
    const SuperOp sp = kron(p.conjugate(), p);
    Eigen::SelfAdjointEigenSolver<Mat> es(sp);
    const Eigen::Index slow = static_cast<Eigen::Index>(np) * np;
    // Eigenvalues ascend, so the slow (eigenvalue 1) sector is the tail.
    split.bq_ = es.eigenvectors().leftCols(n * n - slow);
    split.bp_ = es.eigenvectors().rightCols(slow);
  }
  return split;
}

Eigen::VectorXcd SlowFastSplit::slow_trace_functional() const {
  const Eigen::Index n = p_.rows();
  Vec id = Vec::Zero(n * n);
  for (Eigen::Index a = 0; a < n; ++a) id(a * n + a) = 1.0;
  return bp_.adjoint() * id;
}

ProjectedLindblad::ProjectedLindblad(const SuperOp& l, const Operator& p)
    : split_(SlowFastSplit::from_projector(p)) {
  if (l.rows() != l.cols() || l.rows() != split_.full_dim()) {
    throw DimensionError("ProjectedLindblad: generator dimension does not match projector");
  }
  const auto& bp = split_.slow_basis();
  const auto& bq = split_.fast_basis();
  pp_ = bp.adjoint() * l * bp;
  pq_ = bp.adjoint() * l * bq;
  qp_ = bq.adjoint() * l * bp;
  qq_ = bq.adjoint() * l * bq;
}

Eigen::MatrixXcd ProjectedLindblad::leff_at(Complex z) const {
  const Eigen::Index dq = qq_.rows();
  if (dq == 0) return pp_;  // P = identity: no fast sector
  const Mat sys = z * Mat::Identity(dq, dq) - qq_;
  Eigen::FullPivLU<Mat> lu(sys);
  if (!lu.isInvertible()) {
    Complex nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Complex ev : fast_eigenvalues()) {
      if (std::abs(ev - z) < best) {
        best = std::abs(ev - z);
        nearest = ev;
      }
    }
    throw ResolventPoleError("leff_at: resolvent pole, z hits the fast-block spectrum", nearest);
  }
  return pp_ + pq_ * lu.solve(qp_);
}

Eigen::MatrixXcd ProjectedLindblad::leff_deriv_at(Complex z) const {
  const Eigen::Index dq = qq_.rows();
  if (dq == 0) return Mat::Zero(pp_.rows(), pp_.cols());
  const Mat sys = z * Mat::Identity(dq, dq) - qq_;
  Eigen::FullPivLU<Mat> lu(sys);
  if (!lu.isInvertible()) {
    throw ResolventPoleError("leff_deriv_at: resolvent pole", z);
  }
  const Mat g = lu.solve(qp_);
  return -pq_ * lu.solve(g);
}

ProjectedLindblad::SchurResult ProjectedLindblad::l0_l1() const {
  SchurResult out;
  if (qq_.rows() == 0) {
    out.l0 = pp_;
    out.l1 = Mat::Zero(pp_.rows(), pp_.cols());
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(qq_);
  const auto& sv = svd.singularValues();
  const bool invertible =
      sv.size() > 0 && sv(sv.size() - 1) > numeric_policy().kernel_rel_cutoff * sv(0);
  Mat qq_inv;
  if (invertible) {
    qq_inv = qq_.fullPivLu().inverse();
  } else {
    // Appendix-E regime: Moore-Penrose inverse of the restricted block.
    qq_inv = pseudo_inverse(qq_, numeric_policy().kernel_rel_cutoff);
    out.pseudoinverse_used = true;
  }
  const Mat x = qq_inv * qp_;
  out.l0 = pp_ - pq_ * x;
  out.l1 = -pq_ * qq_inv * x;
  return out;
}

std::vector<Complex> ProjectedLindblad::fast_eigenvalues() const {
  Eigen::ComplexEigenSolver<Mat> eig(qq_, false);
  std::vector<Complex> out(eig.eigenvalues().data(),
                           eig.eigenvalues().data() + eig.eigenvalues().size());
  return out;
}

Eigen::MatrixXcd leff_at(const SuperOp& l, const Operator& p, Complex z) {
  return ProjectedLindblad(l, p).leff_at(z);
}

Eigen::MatrixXcd l0(const SuperOp& l, const Operator& p, bool* pseudoinverse_used) {
  const auto res = ProjectedLindblad(l, p).l0_l1();
  if (pseudoinverse_used) *pseudoinverse_used = res.pseudoinverse_used;
  return res.l0;
}

Eigen::MatrixXcd l1(const SuperOp& l, const Operator& p, bool* pseudoinverse_used) {
  const auto res = ProjectedLindblad(l, p).l0_l1();
  if (pseudoinverse_used) *pseudoinverse_used = res.pseudoinverse_used;
  return res.l1;
}

Eigen::MatrixXcd perturbative_inverse(const Eigen::MatrixXcd& ld, const Eigen::MatrixXcd& w,
                                      int order, bool* may_diverge) {
  if (ld.rows() != ld.cols() || w.rows() != w.cols() || ld.rows() != w.rows()) {
    throw DimensionError("perturbative_inverse: dimension mismatch");
  }
  if (order < 0) {
    throw Error("perturbative_inverse: order must be nonnegative");
  }
  const Eigen::Index n = ld.rows();
  Eigen::FullPivLU<Mat> lu(ld);
  if (!lu.isInvertible()) {
    throw Error("perturbative_inverse: L_D is singular");
  }
  const Mat ld_inv = lu.inverse();
  // Contraction factor of the Neumann series; 1-norm upper bound for the
  // spectral radius of W L_D^{-1}.
  const Mat k = w * ld_inv;
  const double contraction = k.cwiseAbs().colwise().sum().maxCoeff();
  if (may_diverge) *may_diverge = contraction >= 1.0;

  // (L_D + W)^{-1} = sum_n (-L_D^{-1} W)^n L_D^{-1}; the alternating sign is
  // what makes the truncation converge to the exact block inverse.
  Mat term = ld_inv;
  Mat acc = term;
  for (int i = 1; i <= order; ++i) {
    term = -ld_inv * w * term;
    acc += term;
  }
  return acc;
}

LdwSplit build_ld_w(const SuperOp& l, const Operator& h, const Operator& p) {
  const SlowFastSplit split = SlowFastSplit::from_projector(p);
  const Eigen::Index n = h.rows();
  if (l.rows() != n * n) {
    throw DimensionError("build_ld_w: generator dimension does not match Hamiltonian");
  }
  const Operator q = Operator::Identity(n, n) - p;
  const Operator v = p * h * q + q * h * p;
  const Operator id = Operator::Identity(n, n);
  const SuperOp w_full = Complex(0, -1) * (kron(id, v) - kron(v.conjugate(), id));
  const auto& bq = split.fast_basis();
  LdwSplit out;
  out.w = bq.adjoint() * w_full * bq;
  out.ld = bq.adjoint() * l * bq - out.w;
  Mat offdiag = out.ld;
  offdiag.diagonal().setZero();
  out.max_offdiag_ld = offdiag.cwiseAbs().maxCoeff();
  return out;
}

Eigen::VectorXcd EffectiveFamily::trace_functional() const {
  // Default: slow coordinates are a column-stacked density matrix.
  const int d2 = slow_dim();
  const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(d2))));
  if (d * d != d2) {
    throw Error("EffectiveFamily: slow dimension is not a perfect square");
  }
  Vec t = Vec::Zero(d2);
  for (int a = 0; a < d; ++a) t(a * d + a) = 1.0;
  return t;
}

SchurFamily::SchurFamily(const SuperOp& l, const Operator& p)
    : blocks_(l, p), schur_(blocks_.l0_l1()) {}

Eigen::VectorXcd SchurFamily::trace_functional() const {
  return blocks_.split().slow_trace_functional();
}

PerturbativeFamily::PerturbativeFamily(const SuperOp& l, const Operator& h, const Operator& p,
                                       int order)
    : split_(SlowFastSplit::from_projector(p)), order_(order) {
  const auto& bp = split_.slow_basis();
  const auto& bq = split_.fast_basis();
  pp_ = bp.adjoint() * l * bp;
  pq_ = bp.adjoint() * l * bq;
  qp_ = bq.adjoint() * l * bp;
  const auto ldw = build_ld_w(l, h, p);
  ld_ = ldw.ld;
  w_ = ldw.w;
}

int PerturbativeFamily::slow_dim() const { return split_.slow_dim(); }

Eigen::MatrixXcd PerturbativeFamily::resolvent_series(Complex z, int deriv_order) const {
  // R(z) = sum_{n<=order} (G W)^n G with G = (z - L_D)^{-1}; deriv_order 0
  // returns R, 1 returns dR/dz term by term via G' = -G^2.
  const Eigen::Index dq = ld_.rows();
  const Mat g = (z * Mat::Identity(dq, dq) - ld_).fullPivLu().inverse();
  if (deriv_order == 0) {
    Mat term = g;
    Mat acc = g;
    for (int n = 1; n <= order_; ++n) {
      term = g * w_ * term;
      acc += term;
    }
    return acc;
  }
  const Mat g2 = g * g;
  Mat acc = -g2;  // n = 0 term
  for (int n = 1; n <= order_; ++n) {
    // d/dz (G W)^n G: replace one G by -G^2 in each of the n+1 slots.
    for (int slot = 0; slot <= n; ++slot) {
      Mat prod = Mat::Identity(dq, dq);
      for (int pos = 0; pos <= n; ++pos) {
        const Mat& factor = (pos == slot) ? g2 : g;
        prod = prod * factor;
        if (pos < n) prod = prod * w_;
      }
      acc -= prod;
    }
  }
  return acc;
}

Eigen::MatrixXcd PerturbativeFamily::eval(Complex z) const {
  return pp_ + pq_ * resolvent_series(z, 0) * qp_;
}

Eigen::MatrixXcd PerturbativeFamily::deriv(Complex z) const {
  return pq_ * resolvent_series(z, 1) * qp_;
}

std::vector<Complex> PerturbativeFamily::poles() const {
  Eigen::ComplexEigenSolver<Mat> eig(ld_, false);
  return {eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size()};
}

Eigen::VectorXcd PerturbativeFamily::trace_functional() const {
  return split_.slow_trace_functional();
}

TraceCorrection trace_correction(const EffectiveFamily& family) {
  const Mat l0m = family.l0_matrix();
  Eigen::JacobiSVD<Mat> svd(l0m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int rank = svd_rank(sv, numeric_policy().kernel_rel_cutoff);
  TraceCorrection out;
  out.kernel_dim = static_cast<int>(sv.size()) - rank;
  if (out.kernel_dim != 1) {
    throw DegenerateKernelError("trace_correction: kernel of L0 is not one dimensional",
                                out.kernel_dim);
  }
  Vec rho_bar = svd.matrixV().col(sv.size() - 1);
  const Vec t = family.trace_functional();
  const Complex tr = t.dot(rho_bar);
  if (std::abs(tr) < 1e-10 * rho_bar.norm()) {
    throw Error("trace_correction: kernel element of L0 is traceless (non-physical)");
  }
  rho_bar /= tr;
  out.rho_bar = rho_bar;
  out.l1_expectation = t.dot((family.l1_matrix() * rho_bar).eval());
  out.alpha = (1.0 / (Complex(1, 0) - out.l1_expectation)).real();
  return out;
}

Eigen::VectorXcd corrected_evolution(const EffectiveFamily& family, const Eigen::VectorXcd& rho0,
                                     double t) {
  if (rho0.size() != family.slow_dim()) {
    throw DimensionError("corrected_evolution: state dimension mismatch");
  }
  const Complex tr = family.trace_functional().dot(rho0);
  if (std::abs(tr - 1.0) > 1e-6) {
    throw Error("corrected_evolution: initial state must have unit trace");
  }
  const TraceCorrection tc = trace_correction(family);
  return tc.alpha * expm_apply(family.l0_matrix(), t, rho0);
}

TracePreservationReport trace_preserving_check(const SuperOp& l, const Operator& p) {
  const ProjectedLindblad blocks(l, p);
  const auto schur = blocks.l0_l1();
  TracePreservationReport report;

  const Vec t = blocks.split().slow_trace_functional();
  const double l0_scale = schur.l0.norm();
  report.left_trace_residual =
      (schur.l0.adjoint() * t).norm() / (t.norm() * (l0_scale > 0 ? l0_scale : 1.0));

  if (blocks.split().fast_dim() == 0) {
    report.range_inclusion = true;  // Q = 0: nothing to include
    return report;
  }
  Eigen::JacobiSVD<Mat> svd_qq(blocks.qq());
  Mat augmented(blocks.qq().rows(), blocks.qq().cols() + blocks.qp().cols());
  augmented << blocks.qq(), blocks.qp();
  Eigen::JacobiSVD<Mat> svd_aug(augmented);
  const double sigma_max = svd_aug.singularValues().size() ? svd_aug.singularValues()(0) : 0.0;
  const double cutoff = 1e-10 * sigma_max;
  auto rank_at = [cutoff](const Eigen::VectorXd& sv) {
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) ++rank;
    }
    return rank;
  };
  report.rank_qq = rank_at(svd_qq.singularValues());
  report.rank_augmented = rank_at(svd_aug.singularValues());
  report.range_inclusion = report.rank_qq == report.rank_augmented;
  return report;
}

double lindblad_form_defect(const Eigen::MatrixXcd& l0_matrix) {
  const int d2 = static_cast<int>(l0_matrix.rows());
  const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(d2))));
  if (d * d != d2) {
    throw DimensionError("lindblad_form_defect: matrix is not a superoperator");
  }
  // Choi matrix of the map, then conditional complete positivity: project off
  // the maximally entangled direction and require the rest to be PSD.
  Mat choi = Mat::Zero(d2, d2);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      Operator e = Operator::Zero(d, d);
      e(k, l) = 1.0;
      const Operator image = unvectorize(l0_matrix * vectorize(e));
      choi += kron(e, image);
    }
  }
  Vec omega = Vec::Zero(d2);
  for (int i = 0; i < d; ++i) omega(i * d + i) = 1.0;
  omega /= omega.norm();
  const Mat proj = Mat::Identity(d2, d2) - omega * omega.adjoint();
  const Mat reduced = proj * choi * proj;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (reduced + reduced.adjoint().eval()));
  return es.eigenvalues().minCoeff();
}

}  // namespace adel
