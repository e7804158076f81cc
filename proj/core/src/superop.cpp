// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include "adel/superop.hpp"

#include <cmath>

namespace adel {

NumericPolicy& numeric_policy() {
  static NumericPolicy policy;
  return policy;
}

StateVec vectorize(const Operator& rho) {
  if (rho.rows() != rho.cols()) {
    throw DimensionError("vectorize: operator must be square");
  }
  const Eigen::Index n = rho.rows();
  StateVec v(n * n);
  for (Eigen::Index b = 0; b < n; ++b) {
    v.segment(b * n, n) = rho.col(b);
  }
  return v;
}

Operator unvectorize(const StateVec& v) {
  const auto len = v.size();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len) {
    throw DimensionError("unvectorize: length is not a perfect square");
  }
  Operator rho(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    rho.col(b) = v.segment(b * n, n);
  }
  return rho;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

SuperOp sandwich(const Operator& a, const Operator& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("sandwich: operators must be square and of equal dimension");
  }
  return kron(b.conjugate(), a);
}

SuperOp dissipator(const Operator& f) {
  if (f.rows() != f.cols()) {
    throw DimensionError("dissipator: jump operator must be square");
  }
  const Eigen::Index n = f.rows();
  const Operator id = Operator::Identity(n, n);
  const Operator ff = f.adjoint() * f;
  return kron(f.conjugate(), f) - 0.5 * (kron(id, ff) + kron(ff.transpose(), id));
}

SuperOp lindblad(const Operator& h, const std::vector<Operator>& jumps) {
  if (h.rows() != h.cols()) {
    throw DimensionError("lindblad: Hamiltonian must be square");
  }
  if (!is_hermitian(h, numeric_policy().hermiticity_tol)) {
    throw Error("lindblad: Hamiltonian is not Hermitian within tolerance");
  }
  const Eigen::Index n = h.rows();
  const Operator id = Operator::Identity(n, n);
  SuperOp l = Complex(0, -1) * (kron(id, h) - kron(h.conjugate(), id));
  for (const auto& f : jumps) {
    if (f.rows() != n || f.cols() != n) {
      throw DimensionError("lindblad: jump operator dimension mismatch");
    }
    l += dissipator(f);
  }
  return l;
}

SuperProjectors super_projectors(const Operator& p) {
  if (!is_projector(p, numeric_policy().projector_tol)) {
    throw Error("super_projectors: input is not a Hermitian idempotent projector");
  }
  const Eigen::Index n = p.rows();
  SuperProjectors out;
  out.p = kron(p.conjugate(), p);
  out.q = SuperOp::Identity(n * n, n * n) - out.p;
  return out;
}

Complex expectation(const StateVec& v, const Operator& o) {
  if (o.rows() != o.cols() || o.rows() * o.cols() != v.size()) {
    throw DimensionError("expectation: dimension mismatch");
  }
  const Eigen::Index n = o.rows();
  Complex acc = 0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      acc += o(a, b) * v(a * n + b);  // tr(O rho) = sum_ab O(a,b) rho(b,a)
    }
  }
  return acc;
}

Complex trace_of_vec(const StateVec& v) {
  const auto len = v.size();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len) {
    throw DimensionError("trace_of_vec: length is not a perfect square");
  }
  Complex acc = 0;
  for (Eigen::Index a = 0; a < n; ++a) {
    acc += v(a * n + a);
  }
  return acc;
}

bool is_hermitian(const Operator& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return hermiticity_defect(a) <= tol;
}

double hermiticity_defect(const Operator& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_projector(const Operator& p, double tol) {
  if (p.rows() != p.cols()) return false;
  if (hermiticity_defect(p) > tol) return false;
  return (p * p - p).cwiseAbs().maxCoeff() <= tol;
}

Operator pauli_x() {
  Operator s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

Operator pauli_y() {
  Operator s(2, 2);
  s << 0, Complex(0, -1), Complex(0, 1), 0;
  return s;
}

Operator pauli_z() {
  Operator s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

}  // namespace adel
