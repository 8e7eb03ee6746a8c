// SPDX-License-Identifier: Apache-2.0

#include "phsg/analysis.hpp"

#include "phsg/chaos.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace phsg {
namespace {

constexpr double kPi = 3.14159265358979323846;

/// E^{-1} M for the implicit-to-explicit reduction, with an identity
/// fast path and a singularity check on the LU diagonal.
struct ExplicitForm {
  Matrix a, b;
};

ExplicitForm explicit_form(const LTISystem& sys, const char* who) {
  ExplicitForm ex;
  if (sys.E.isIdentity(0.0)) {
    ex.a = sys.A;
    ex.b = sys.B;
    return ex;
  }
  Eigen::PartialPivLU<Matrix> lu(sys.E);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) {
    std::ostringstream msg;
    msg << who << ": singular mass matrix";
    throw NumericalError(msg.str());
  }
  ex.a = lu.solve(sys.A);
  ex.b = lu.solve(sys.B);
  return ex;
}

bool all_stable(const ComplexVector& eigs, double margin) {
  for (Index i = 0; i < eigs.size(); ++i)
    if (!(eigs[i].real() < -margin)) return false;
  return true;
}

void require_strictly_proper(const LTISystem& sys, const char* who) {
  if (sys.D.size() > 0 && sys.D.cwiseAbs().maxCoeff() != 0.0) {
    std::ostringstream msg;
    msg << who << ": nonzero feedthrough (H2 norm is infinite)";
    throw ConfigError(msg.str());
  }
}

/// Feedthrough block, materialized as zero when left unset.
Matrix feedthrough(const LTISystem& s) {
  return s.D.size() > 0 ? s.D : Matrix::Zero(s.outputs(), s.inputs());
}

/// Block-diagonal difference realization of H0 - Hi with stacked output
/// [C0, -Ci]; avoids subtracting transfer samples.
LTISystem difference_system(const LTISystem& h0, const LTISystem& hi) {
  if (h0.outputs() != hi.outputs() || h0.inputs() != hi.inputs())
    throw ConfigError("rel_h2_difference: I/O dimension mismatch");
  const Index n0 = h0.n(), n1 = hi.n();
  LTISystem d;
  d.E = Matrix::Zero(n0 + n1, n0 + n1);
  d.E.topLeftCorner(n0, n0) = h0.E;
  d.E.bottomRightCorner(n1, n1) = hi.E;
  d.A = Matrix::Zero(n0 + n1, n0 + n1);
  d.A.topLeftCorner(n0, n0) = h0.A;
  d.A.bottomRightCorner(n1, n1) = hi.A;
  d.B.resize(n0 + n1, h0.inputs());
  d.B.topRows(n0) = h0.B;
  d.B.bottomRows(n1) = hi.B;
  d.C.resize(h0.outputs(), n0 + n1);
  d.C.leftCols(n0) = h0.C;
  d.C.rightCols(n1) = -hi.C;
  d.D = feedthrough(h0) - feedthrough(hi);
  return d;
}

}  // namespace

ComplexMatrix transfer(const LTISystem& sys, std::complex<double> sigma) {
  const Index n = sys.n();
  ComplexMatrix m =
      sigma * sys.E.cast<std::complex<double>>() -
      sys.A.cast<std::complex<double>>();
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) {
    std::ostringstream msg;
    msg << "transfer: singular pencil at sigma = (" << sigma.real() << ", "
        << sigma.imag() << ")";
    throw NumericalError(msg.str());
  }
  ComplexMatrix h = sys.C.cast<std::complex<double>>() *
                    lu.solve(sys.B.cast<std::complex<double>>().eval());
  if (sys.D.size() > 0) h += sys.D.cast<std::complex<double>>();
  (void)n;
  return h;
}

FrequencyResponse bode(const LTISystem& sys, double omega_min,
                       double omega_max, int points) {
  if (points < 2) throw ConfigError("bode: need at least 2 points");
  if (!(omega_min > 0.0) || !(omega_max > omega_min))
    throw ConfigError("bode: need 0 < omega_min < omega_max");

  const Index q = sys.outputs();
  const Index p = sys.inputs();
  FrequencyResponse fr;
  fr.frequencies.resize(points);
  fr.values.reserve(points);
  fr.magnitude_db.resize(points, q * p);
  fr.phase_deg.resize(points, q * p);

  const double lmin = std::log(omega_min), lmax = std::log(omega_max);
  for (int k = 0; k < points; ++k) {
    const double w =
        std::exp(lmin + (lmax - lmin) * k / static_cast<double>(points - 1));
    fr.frequencies[k] = w;
  }
  fr.frequencies.front() = omega_min;
  fr.frequencies.back() = omega_max;

  for (int k = 0; k < points; ++k) {
    const ComplexMatrix h =
        transfer(sys, std::complex<double>(0.0, fr.frequencies[k]));
    fr.values.push_back(h);
    for (Index o = 0; o < q; ++o)
      for (Index i = 0; i < p; ++i) {
        const Index ch = o * p + i;
        const std::complex<double> v = h(o, i);
        fr.magnitude_db(k, ch) =
            20.0 * std::log10(std::max(std::abs(v), 1e-300));
        double ph = std::atan2(v.imag(), v.real()) * 180.0 / kPi;
        if (k > 0) {
          const double prev = fr.phase_deg(k - 1, ch);
          ph += 360.0 * std::round((prev - ph) / 360.0);
        }
        fr.phase_deg(k, ch) = ph;
      }
  }
  return fr;
}

bool stability(const LTISystem& sys, double margin) {
  const ExplicitForm ex = explicit_form(sys, "stability");
  const SchurForm schur = real_schur(ex.a);
  return all_stable(schur_eigenvalues(schur.T), margin);
}

double h2_norm(const LTISystem& sys) {
  require_strictly_proper(sys, "h2_norm");
  if (sys.B.size() == 0 || sys.B.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const ExplicitForm ex = explicit_form(sys, "h2_norm");
  const SchurForm schur = real_schur(ex.a);
  if (!all_stable(schur_eigenvalues(schur.T), 0.0))
    throw NumericalError("h2_norm: system is not asymptotically stable");
  const Matrix z = lyapunov_factor(schur, ex.b);
  return (sys.C * z).norm();
}

double h2_norm_observability(const LTISystem& sys) {
  require_strictly_proper(sys, "h2_norm_observability");
  const ExplicitForm ex = explicit_form(sys, "h2_norm_observability");
  const SchurForm schur = real_schur(ex.a);
  if (!all_stable(schur_eigenvalues(schur.T), 0.0))
    throw NumericalError(
        "h2_norm_observability: system is not asymptotically stable");
  const Matrix zq =
      lyapunov_factor(transposed_schur(schur), sys.C.transpose());
  return (zq.transpose() * ex.b).norm();
}

double h2_norm_frequency(const LTISystem& sys, int panels,
                         int points_per_panel) {
  require_strictly_proper(sys, "h2_norm_frequency");
  if (panels < 1 || points_per_panel < 2)
    throw ConfigError("h2_norm_frequency: invalid grid parameters");

  // (1/pi) \int_0^inf ||H(i w)||_F^2 dw with w = tan(theta): composite
  // Gauss-Legendre panels over theta in [0, pi/2).
  std::vector<double> nodes, weights;
  gauss_legendre(points_per_panel, nodes, weights);  // weights sum to 1

  CompensatedSum acc;
  const double width = (kPi / 2.0) / panels;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double lo = pnl * width;
    for (int j = 0; j < points_per_panel; ++j) {
      const double theta = lo + 0.5 * (nodes[j] + 1.0) * width;
      const double w = std::tan(theta);
      const double sec2 = 1.0 + w * w;
      const ComplexMatrix h = transfer(sys, std::complex<double>(0.0, w));
      acc.add(weights[j] * width * h.squaredNorm() * sec2);
    }
  }
  return std::sqrt(acc.value() / kPi);
}

double rel_h2_difference(const LTISystem& h0, const LTISystem& hi) {
  const double denom = h2_norm(h0);
  if (denom == 0.0)
    throw NumericalError("rel_h2_difference: reference system has zero norm");
  return h2_norm(difference_system(h0, hi)) / denom;
}

double mor_rel_error(const LTISystem& fom, const LTISystem& rom) {
  return rel_h2_difference(fom, rom);
}

H2Cache h2_prepare(const LTISystem& sys) {
  require_strictly_proper(sys, "h2_prepare");
  H2Cache cache;
  const ExplicitForm ex = explicit_form(sys, "h2_prepare");
  cache.a_tilde = ex.a;
  cache.b_tilde = ex.b;
  cache.c = sys.C;
  cache.d = sys.D;
  cache.schur = real_schur(cache.a_tilde);
  if (!all_stable(schur_eigenvalues(cache.schur.T), 0.0))
    throw NumericalError("h2_prepare: system is not asymptotically stable");
  cache.z = lyapunov_factor(cache.schur, cache.b_tilde);
  cache.norm = (cache.c * cache.z).norm();
  return cache;
}

double mor_rel_error(const H2Cache& fom, const LTISystem& rom) {
  if (rom.outputs() != fom.c.rows() || rom.inputs() != fom.b_tilde.cols())
    throw ConfigError("mor_rel_error: I/O dimension mismatch");
  {
    Matrix fd = fom.d.size() > 0
                    ? fom.d
                    : Matrix::Zero(fom.c.rows(), fom.b_tilde.cols());
    Matrix rd = rom.D.size() > 0 ? rom.D
                                 : Matrix::Zero(rom.outputs(), rom.inputs());
    if ((fd - rd).cwiseAbs().maxCoeff() != 0.0)
      throw ConfigError("mor_rel_error: feedthrough mismatch");
  }
  if (fom.norm == 0.0)
    throw NumericalError("mor_rel_error: reference system has zero norm");

  const ExplicitForm exr = explicit_form(rom, "mor_rel_error");
  const SchurForm schur_r = real_schur(exr.a);
  if (!all_stable(schur_eigenvalues(schur_r.T), 0.0))
    throw NumericalError("mor_rel_error: ROM is not asymptotically stable");

  // || H0 - Hr ||^2 = ||H0||^2 - 2 tr(C0 X Cr^T) + ||Hr||^2 with the cross
  // Gramian X solving A0 X + X Ar^T + B0 Br^T = 0.
  const Matrix zr = lyapunov_factor(schur_r, exr.b);
  const double rom_norm2 = (rom.C * zr).squaredNorm();
  const Matrix x = sylvester_solve(fom.schur, schur_r,
                                   fom.b_tilde * exr.b.transpose());
  const double cross = ((fom.c * x).cwiseProduct(rom.C)).sum();
  const double diff2 =
      std::max(fom.norm * fom.norm - 2.0 * cross + rom_norm2, 0.0);
  return std::sqrt(diff2) / fom.norm;
}

}  // namespace phsg
