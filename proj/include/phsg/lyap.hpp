// SPDX-License-Identifier: Apache-2.0
//
// Dense real-Schur-based Lyapunov and Sylvester solvers (Bartels-Stewart).
// The Schur form is exposed so callers solving several equations with the
// same coefficient matrix pay for the decomposition once.

#pragma once

#include "phsg/types.hpp"

namespace phsg {

/// Real Schur decomposition A = U T U^T with U orthogonal and T quasi
/// upper-triangular (1x1 and 2x2 diagonal blocks).
struct SchurForm {
  Matrix U;
  Matrix T;
};

SchurForm real_schur(const Matrix& A);

/// Eigenvalues read off the quasi-triangular factor.
ComplexVector schur_eigenvalues(const Matrix& T);

/// Solve A X + X B^T + W = 0 given Schur forms of A (na x na) and
/// B (nb x nb); W is na x nb. Requires spec(A) and spec(-B) disjoint.
Matrix sylvester_solve(const SchurForm& a, const SchurForm& b,
                       const Matrix& W);

/// Solve A X + X A^T + W = 0, W symmetric (controllability type).
Matrix lyapunov_solve(const SchurForm& a, const Matrix& W);

/// Solve A^T X + X A + W = 0, W symmetric (observability type).
Matrix lyapunov_solve_transposed(const SchurForm& a, const Matrix& W);

/// Schur form of A^T derived from a Schur form of A without a second
/// decomposition (orthogonal reversal of the transposed factor).
SchurForm transposed_schur(const SchurForm& a);

/// Factored Lyapunov solve: returns Z with A (Z Z^T) + (Z Z^T) A^T + B B^T
/// = 0, computed directly in factored form (trailing-block recursion on the
/// Schur form). Quantities of the form ||C Z||_F derived from the factor are
/// accurate to O(machine eps) even when the exact value vanishes, unlike
/// trace formulas on the assembled Gramian.
Matrix lyapunov_factor(const SchurForm& a, const Matrix& B);

}  // namespace phsg
