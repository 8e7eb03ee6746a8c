// SPDX-License-Identifier: Apache-2.0
//
// Linear first-order port-Hamiltonian systems
//
//   E x'(t) = (J - R) Q x(t) + (B - P) u(t)
//      y(t) = (B + P)^T Q x(t) + (S + N) u(t)
//
// with J, N skew-symmetric, E^T Q symmetric positive semi-definite, and the
// dissipation block W = [Q^T R Q, Q^T P; P^T Q, S] symmetric positive
// semi-definite. The Hamiltonian (stored energy) is H(x) = 1/2 x^T E^T Q x.
//
// Two equivalence transformations rewrite a system with Q = I ("standard
// form") so that Galerkin-type projections preserve the structure:
//   * basis transformation  x~ = T^T x with Q = T T^T,
//   * image-space transformation (left-multiplication by Q^T).

#pragma once

#include "phsg/types.hpp"

#include <string>
#include <vector>

namespace phsg {

struct PHSystem {
  Index n = 0;  ///< state dimension
  Index m = 0;  ///< port dimension
  Matrix E, J, R, Q;  ///< n x n
  Matrix B, P;        ///< n x m
  Matrix S, N;        ///< m x m

  /// System with E = Q = I and all other slots zero.
  static PHSystem identity(Index n, Index m);
};

/// Port-Hamiltonian system in standard form, i.e. with Q = I. E is symmetric
/// positive definite here and the Hamiltonian reduces to H(x) = 1/2 x^T E x.
struct StandardPHSystem {
  Index n = 0;
  Index m = 0;
  Matrix E, J, R;  ///< n x n
  Matrix B, P;     ///< n x m
  Matrix S, N;     ///< m x m

  [[nodiscard]] PHSystem as_ph() const;
};

/// General descriptor-form LTI system E x' = A x + B u, y = C x + D u with
/// non-singular E.
struct LTISystem {
  Matrix E, A;  ///< n x n
  Matrix B;     ///< n x p
  Matrix C;     ///< q x n
  Matrix D;     ///< q x p

  [[nodiscard]] Index n() const { return A.rows(); }
  [[nodiscard]] Index inputs() const { return B.cols(); }
  [[nodiscard]] Index outputs() const { return C.rows(); }
};

/// Outcome of the structural validation of a (standard) pH system. Violation
/// magnitudes are reported so callers can log how close a failing matrix was.
struct ValidationReport {
  bool j_skew = false;
  bool n_skew = false;
  bool eq_symmetric = false;
  bool eq_psd = false;
  bool w_psd = false;
  bool e_nonsingular = false;
  bool q_nonsingular = false;

  double j_skew_violation = 0.0;   ///< max |(J + J^T)_{kl}|
  double n_skew_violation = 0.0;   ///< max |(N + N^T)_{kl}|
  double eq_asymmetry = 0.0;       ///< max |(E^T Q - Q^T E)_{kl}|
  double eq_min_eigenvalue = 0.0;  ///< smallest eigenvalue of sym(E^T Q)
  double w_min_eigenvalue = 0.0;   ///< smallest eigenvalue of sym(W)
  double e_rcond = 0.0;
  double q_rcond = 0.0;

  [[nodiscard]] bool passed() const {
    return j_skew && n_skew && eq_symmetric && eq_psd && w_psd &&
           e_nonsingular && q_nonsingular;
  }
  [[nodiscard]] std::string summary() const;
};

/// Default eigenvalue tolerance for positive-semi-definiteness tests: the
/// smallest eigenvalue of the symmetrized matrix must be >= -tol*(1+|M|_F).
inline constexpr double kDefaultPsdTol = 1e-10;

/// Reciprocal-condition threshold below which E or Q counts as singular.
inline constexpr double kRcondThreshold = 1e-12;

/// Checks all structural invariants of a pH system. Throws ConfigError on
/// dimension mismatches; numerical failures are reported, not thrown.
ValidationReport validate_ph(const PHSystem& sys, double tol = kDefaultPsdTol);

/// Validation of the standard (Q = I) form; E must additionally be SPD.
ValidationReport validate_standard(const StandardPHSystem& sys,
                                   double tol = kDefaultPsdTol);

/// H(x) = 1/2 x^T (E^T Q) x.
double hamiltonian(const PHSystem& sys, const Vector& x);

/// H(x) = 1/2 x^T E x for the standard form.
double hamiltonian(const StandardPHSystem& sys, const Vector& x);

enum class Factorization { Cholesky, Sqrt };

/// Factor an SPD matrix as Q = T T^T. Cholesky gives a lower-triangular T,
/// Sqrt gives the symmetric principal square root. Throws NumericalError if
/// Q is not SPD.
Matrix symmetric_decomposition(const Matrix& Q,
                               Factorization method = Factorization::Sqrt);

/// Rewrite with the state change x~ = T^T x where Q = T T^T:
///   E~ = T^T E T^{-T}, J~ = T^T J T, R~ = T^T R T, B~ = T^T B, P~ = T^T P.
/// Hamiltonians are related by H~(T^T x) = H(x).
std::pair<StandardPHSystem, Matrix> basis_transform(
    const PHSystem& sys, Factorization method = Factorization::Sqrt);

/// Left-multiply the dynamical equation by Q^T:
///   E~ = Q^T E, J~ = Q^T J Q, R~ = Q^T R Q, B~ = Q^T B, P~ = Q^T P.
/// The Hamiltonian is unchanged: H~(x) = H(x).
StandardPHSystem image_transform(const PHSystem& sys);

/// Forget the pH structure: A = (J-R)Q, B = B-P, C = (B+P)^T Q, D = S+N.
LTISystem to_lti(const PHSystem& sys);
LTISystem to_lti(const StandardPHSystem& sys);

/// Central-difference residual r_i = dH/dt(t_i) - (w^T u)(t_i) on a uniform
/// grid with spacing dt. `order` in {2, 4, 6, 8} selects the stencil width.
/// For a passive system the exact residual is -dissipation <= 0; the returned
/// values exceed 0 only by differencing error. Entries too close to the ends
/// for the stencil are skipped (the result has size N - order).
std::vector<double> passivity_residual(const std::vector<double>& hamiltonian,
                                       const std::vector<double>& power,
                                       double dt, int order = 2);

}  // namespace phsg
