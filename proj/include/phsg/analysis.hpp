// SPDX-License-Identifier: Apache-2.0
//
// Transfer functions, Bode data, stability checks, H2 norms, and the
// relative H2 difference / model-reduction error metrics.

#pragma once

#include "phsg/lyap.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/types.hpp"

#include <complex>
#include <vector>

namespace phsg {

/// Transfer function H(sigma) = C (sigma E - A)^{-1} B + D.
ComplexMatrix transfer(const LTISystem& sys, std::complex<double> sigma);

/// Frequency response on a strictly increasing logarithmic grid. Channel
/// column order is output-major: channel (o, i) lives in column o*p + i for
/// p inputs.
struct FrequencyResponse {
  std::vector<double> frequencies;    ///< rad/s
  std::vector<ComplexMatrix> values;  ///< H(i omega) per frequency
  Matrix magnitude_db;                ///< 20 log10 |H|, points x channels
  Matrix phase_deg;                   ///< unwrapped phase, points x channels
};

FrequencyResponse bode(const LTISystem& sys, double omega_min = 1e0,
                       double omega_max = 1e7, int points = 400);

/// True if every generalized eigenvalue of (A, E) has real part < -margin.
bool stability(const LTISystem& sys, double margin = 0.0);

/// H2 norm of an asymptotically stable system with zero feedthrough,
/// computed from the factored controllability Gramian of
/// A P E^T + E P A^T + B B^T = 0 as sqrt(trace(C P C^T)).
double h2_norm(const LTISystem& sys);

/// Cross-check route via the observability Gramian.
double h2_norm_observability(const LTISystem& sys);

/// Cross-check route via the frequency-domain integral
/// (1/2 pi) \int ||H(i w)||_F^2 dw on a tan-substituted Gauss grid.
double h2_norm_frequency(const LTISystem& sys, int panels = 64,
                         int points_per_panel = 12);

/// || H0 - Hi ||_H2 / || H0 ||_H2 via the block-diagonal augmented
/// difference realization with stacked output [C0, -Ci].
double rel_h2_difference(const LTISystem& h0, const LTISystem& hi);

/// Relative model-reduction error; identical metric to rel_h2_difference,
/// with the convention that callers pass the FOM in SIMO-restricted form so
/// all outputs enter the error.
double mor_rel_error(const LTISystem& fom, const LTISystem& rom);

/// Cached FOM quantities for error sweeps over many ROMs sharing one FOM:
/// one Schur decomposition and one Gramian factor, reused per ROM through a
/// cross-term Sylvester solve.
struct H2Cache {
  Matrix a_tilde;   ///< E^{-1} A
  Matrix b_tilde;   ///< E^{-1} B
  Matrix c;
  Matrix d;
  SchurForm schur;  ///< Schur form of a_tilde
  Matrix z;         ///< controllability Gramian factor, P = Z Z^T
  double norm = 0;  ///< ||H||_H2
};

H2Cache h2_prepare(const LTISystem& sys);
double mor_rel_error(const H2Cache& fom, const LTISystem& rom);

}  // namespace phsg
