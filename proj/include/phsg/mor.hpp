// SPDX-License-Identifier: Apache-2.0
//
// Projection-based model order reduction: one-sided rational Arnoldi, IRKA
// restricted to Galerkin form (W := V), balanced truncation, and the
// structure-preserving Galerkin reduction of standard-form pH systems.

#pragma once

#include "phsg/ph_system.hpp"
#include "phsg/sg.hpp"
#include "phsg/types.hpp"

#include <complex>
#include <vector>

namespace phsg {

/// Reduced realizations carry no structure claims; dimensions only.
using ReducedLTISystem = LTISystem;

/// Sparse descriptor realization E x' = A x + B u, y = C x + D u used by the
/// shifted-solve reduction methods (B, C, D stay dense: they are thin).
struct SparseLTISystem {
  SparseMatrix E, A;
  Matrix B, C, D;

  [[nodiscard]] Index n() const { return A.rows(); }
  [[nodiscard]] Index inputs() const { return B.cols(); }
  [[nodiscard]] Index outputs() const { return C.rows(); }
};

/// I/O-restricted sparse realization of an SG system (see IOMode).
SparseLTISystem sparse_restrict(const SGSystem& sg, IOMode mode);

/// Dense copy.
LTISystem densify(const SparseLTISystem& sys);

/// One-sided rational Arnoldi: V spans the order-r rational Krylov space
/// K_r((sigma0 E - A)^{-1} E, (sigma0 E - A)^{-1} B) for a single-input
/// system. Columns are nested: the leading r' columns span the order-r'
/// space. On breakdown the achieved rank is returned (v has fewer columns
/// and `deflated` is set).
struct ArnoldiResult {
  Matrix v;
  bool deflated = false;
  Index requested = 0;
};
ArnoldiResult arnoldi_basis(const SparseLTISystem& sys, Index r,
                            double sigma0 = 0.0);

struct IrkaOptions {
  int maxiter = 100;
  double tol = 1e-6;  ///< relative shift-change convergence threshold
  /// Default initial shifts: log-spaced on [shift_min, shift_max], real
  /// positive (mirrored into the right half-plane).
  double shift_min = 1e-2;
  double shift_max = 1e6;
  std::vector<std::complex<double>> init_shifts;  ///< overrides when set
};

struct IrkaResult {
  Matrix v;
  bool converged = false;
  int iterations = 0;
  /// True when the final interpolation space fell short of the requested
  /// order numerically; the trailing columns of v are orthonormal
  /// completions of the rank-revealing QR rather than Krylov directions.
  bool deflated = false;
  std::vector<std::complex<double>> shifts;  ///< final shift set
};

/// IRKA shift iteration for SISO systems with the Galerkin restriction
/// W := V. Mirrors reduced poles into the right half-plane as the next
/// shifts; returns the orthonormalized interpolation basis. Complex shifts
/// that cannot be grouped into conjugate pairs raise NumericalError.
IrkaResult irka_galerkin(const SparseLTISystem& sys, Index r,
                         const IrkaOptions& opts = {});

/// Square-root balanced truncation of an asymptotically stable system.
/// rom is in explicit form (E = I_r); v/w are the descriptor-side projection
/// pair with w^T E v = I_r, so rom agrees with petrov_reduce(sys, v, w).
struct BtResult {
  ReducedLTISystem rom;
  Vector hankel;  ///< all Hankel singular values, non-increasing
  Matrix v, w;
};

/// Precomputed balancing data: the dense Gramian work is done once, every
/// reduced order r <= rank is then a leading principal slice.
struct BtSweep {
  Vector hankel;            ///< all Hankel singular values, non-increasing
  Index rank = 0;           ///< numerical rank of the Hankel spectrum
  Matrix a_hat, b_hat, c_hat, d;  ///< rank-sized balanced realization
  Matrix v, w;              ///< descriptor-side projection pair, rank columns
};
BtSweep bt_prepare(const LTISystem& sys, Index max_dim = 4000);
BtResult bt_slice(const BtSweep& sweep, Index r);
BtResult balanced_truncation(const LTISystem& sys, Index r,
                             Index max_dim = 4000);

/// Structure-preserving Galerkin reduction of a standard-form SG system:
/// E_r = V^T E V, J_r = V^T J V, R_r = V^T R V, B_r = V^T B, P_r = V^T P,
/// S and N carried over. The reduced system is pH again and satisfies
/// H_r(v) = H(V v).
struct ReducedPHSystem {
  StandardPHSystem rom;
  Matrix v;  ///< lifting handle back to the full space
};
ReducedPHSystem galerkin_reduce(const SGSystem& sg, const Matrix& v);

/// Two-sided (Petrov) projection: E_r = W^T E V, A_r = W^T A V, B_r = W^T B,
/// C_r = C V, D unchanged.
ReducedLTISystem petrov_reduce(const LTISystem& sys, const Matrix& v,
                               const Matrix& w);
ReducedLTISystem petrov_reduce(const SparseLTISystem& sys, const Matrix& v,
                               const Matrix& w);

}  // namespace phsg
