// SPDX-License-Identifier: Apache-2.0
//
// Stochastic Galerkin projection: maps a parametric matrix A(mu) to the
// block matrix with blocks (i,j) holding E[A(mu) Phi_i(mu) Phi_j(mu)] over
// the chaos basis. Applied to a parametric pH system in standard (Q = I)
// form, the projected system is again port-Hamiltonian with identity energy
// matrix, and its Hamiltonian equals the expected Hamiltonian of the
// parametric system for states expanded in the same basis.
//
// Entrywise matrices are assembled per entry with quadrature restricted to
// the dimensions the entry depends on (exact orders where polynomial degrees
// are known); only black-box matrices require a full tensor rule over all
// dimensions.

#pragma once

#include "phsg/chaos.hpp"
#include "phsg/parametric.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/types.hpp"

#include <cstddef>
#include <functional>
#include <optional>

namespace phsg {

struct SGOptions {
  /// Entries with |value| <= droptol * max|value| are not stored.
  double droptol = 1e-14;
  /// Gauss points per dimension for non-polynomial matrices.
  int quad_points = 7;
  /// Added to every per-dimension Gauss order (polynomial-exact orders
  /// included); raising it must not change exactly integrated entries, which
  /// is what the quadrature-saturation tests assert.
  int extra_points = 0;
  /// Cap on tensor-rule node counts.
  std::size_t node_cap = 10'000'000;
};

/// Galerkin-projected pH system (energy matrix implicitly the identity).
struct SGSystem {
  ChaosBasis basis;
  ParameterBox box;
  Index n = 0;  ///< base state dimension
  Index m = 0;  ///< base port dimension
  SparseMatrix E, J, R;  ///< ns x ns
  SparseMatrix B, P;     ///< ns x ms
  SparseMatrix S, N;     ///< ms x ms

  [[nodiscard]] int s() const { return basis.size(); }
  [[nodiscard]] Index ns() const { return n * basis.size(); }
  [[nodiscard]] Index ms() const { return m * basis.size(); }

  /// Leading sub-basis restriction: keep only the modes of total degree
  /// <= d_small. Valid because block (i,j) is independent of the basis size.
  [[nodiscard]] SGSystem truncate_degree(int d_small) const;

  /// Structural validation (dense eigenvalue checks).
  [[nodiscard]] ValidationReport validate(double tol = kDefaultPsdTol) const;
};

enum class IOMode { MIMO, SIMO, SISO };

/// Galerkin projection of one parametric matrix; ns x ms sparse result in
/// mode-major block layout (block (i,j) sits at rows i*n.., cols j*m..).
SparseMatrix sg_project(const ParametricMatrix& A, const ChaosBasis& basis,
                        const ParameterBox& box, const SGOptions& opts = {});

/// Project a standard-form parametric pH system; the result satisfies the
/// pH structure invariants by construction.
SGSystem assemble_sg(const ParametricStandardPH& sys, const ChaosBasis& basis,
                     const SGOptions& opts = {});

/// Project the LTI matrices of a general-Q parametric pH system without any
/// transformation. No structure is claimed; serves as the reference
/// realization for transformation-convergence studies.
LTISystem assemble_sg_general(const ParametricPHSystem& sys,
                              const ChaosBasis& basis,
                              const SGOptions& opts = {});

/// H(v) = 1/2 v^T E v of the projected system.
double sg_hamiltonian(const SGSystem& sg, const Vector& v);

/// Independent oracle: E[H(sum_j v_j Phi_j(mu), mu)] by direct quadrature of
/// the parametric Hamiltonian (E-weighted quadratic form of the expanded
/// state). Exact for polynomial E with a rule of sufficient order.
double expected_hamiltonian_oracle(const ParametricStandardPH& sys,
                                   const ChaosBasis& basis, const Vector& v,
                                   const QuadratureRule& rule);

/// Batched oracle: one quadrature sweep for many coefficient vectors
/// (columns of V). Node-chunked matrix products; deterministic compensated
/// accumulation per vector.
Vector expected_hamiltonian_oracle(const ParametricStandardPH& sys,
                                   const ChaosBasis& basis, const Matrix& V,
                                   const QuadratureRule& rule);

/// Mode-k Hamiltonian coefficient matrix: the projection of E(mu) Phi_k(mu).
/// k is 1-based; k = 1 reproduces the system matrix E. All are symmetric;
/// for k >= 2 they are generally indefinite.
SparseMatrix higher_mode_matrix(const ParametricStandardPH& sys,
                                const ChaosBasis& basis, int k,
                                const SGOptions& opts = {});

/// Input/output restriction by stochastic mode: MIMO keeps all ms ports,
/// SIMO keeps only the mode-1 input block (all outputs), SISO keeps the
/// mode-1 input and mode-1 output blocks.
LTISystem io_restrict(const SGSystem& sg, IOMode mode);

/// The same restriction for a general projected LTI system with ms inputs
/// and outputs.
LTISystem io_restrict(const LTISystem& sg_lti, Index m, int s, IOMode mode);

/// Deterministic input lifted into the chaos basis: u_hat = (u^T, 0, ..., 0).
std::function<Vector(double)> lift_input(std::function<Vector(double)> u,
                                         int s, Index m);

/// Stored-nonzero ratio nnz / (rows*cols).
double sparsity_ratio(const SparseMatrix& M);

IOMode parse_io_mode(const std::string& text);

}  // namespace phsg
