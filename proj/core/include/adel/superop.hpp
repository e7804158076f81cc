// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "adel/types.hpp"

namespace adel {

// Vectorization calculus on the operator-vector isomorphism: the matrix
// |a><b| maps to the unit vector at index b*N + a (column stacking), so that
// A rho B^dag maps to (conj(B) (x) A) vec(rho).

StateVec vectorize(const Operator& rho);
Operator unvectorize(const StateVec& v);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Superoperator of rho -> A rho B^dag, i.e. conj(B) (x) A.
SuperOp sandwich(const Operator& a, const Operator& b);

/// D(F) = conj(F)(x)F - 1/2 (1 (x) F^dag F + (F^dag F)^T (x) 1).
SuperOp dissipator(const Operator& f);

/// Full Lindblad generator -i(1(x)H - conj(H)(x)1) + sum_i D(F_i).
/// H must be Hermitian within numeric_policy().hermiticity_tol.
SuperOp lindblad(const Operator& h, const std::vector<Operator>& jumps);

struct SuperProjectors {
  SuperOp p;  // conj(P) (x) P
  SuperOp q;  // identity - p
};

/// Super-projectors built from a Hermitian idempotent P on the Hilbert space.
SuperProjectors super_projectors(const Operator& p);

/// tr(O * unvectorize(v)).
Complex expectation(const StateVec& v, const Operator& o);

/// Trace of the represented operator (the O = identity special case).
Complex trace_of_vec(const StateVec& v);

bool is_hermitian(const Operator& a, double tol);
bool is_projector(const Operator& p, double tol);

/// Max-norm distance from Hermiticity, ||A - A^dag||_max.
double hermiticity_defect(const Operator& a);

/// Pauli matrices in the documented convention: sigma_z |0> = +|0>, the
/// leading basis state (g1) is spin-up.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

}  // namespace adel
