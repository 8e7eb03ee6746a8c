// SPDX-License-Identifier: Apache-2.0

#include "phsg/mor.hpp"

#include "phsg/lyap.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

namespace phsg {
namespace {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

Matrix sparse_to_dense(const SparseMatrix& m) { return Matrix(m); }

/// Canonical ordering for shift-set comparison and conjugate pairing:
/// ascending real part, then |imag|, then imag (so a conjugate pair is
/// adjacent with the negative-imag member first).
bool shift_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  const double aa = std::abs(a.imag()), ab = std::abs(b.imag());
  if (aa != ab) return aa < ab;
  return a.imag() < b.imag();
}

bool effectively_real(const Complex& s) {
  return std::abs(s.imag()) <= 1e-12 * std::max(1.0, std::abs(s));
}

}  // namespace

SparseLTISystem sparse_restrict(const SGSystem& sg, IOMode mode) {
  SparseLTISystem sys;
  sys.E = sg.E;
  sys.A = sg.J - sg.R;
  const Matrix b_full = Matrix(sg.B) - Matrix(sg.P);
  const Matrix c_full = (Matrix(sg.B) + Matrix(sg.P)).transpose();
  const Matrix d_full = Matrix(sg.S) + Matrix(sg.N);
  const Index m = sg.m;
  switch (mode) {
    case IOMode::MIMO:
      sys.B = b_full;
      sys.C = c_full;
      sys.D = d_full;
      break;
    case IOMode::SIMO:
      sys.B = b_full.leftCols(m);
      sys.C = c_full;
      sys.D = d_full.leftCols(m);
      break;
    case IOMode::SISO:
      sys.B = b_full.leftCols(m);
      sys.C = c_full.topRows(m);
      sys.D = d_full.topLeftCorner(m, m);
      break;
  }
  return sys;
}

LTISystem densify(const SparseLTISystem& sys) {
  LTISystem d;
  d.E = sparse_to_dense(sys.E);
  d.A = sparse_to_dense(sys.A);
  d.B = sys.B;
  d.C = sys.C;
  d.D = sys.D;
  return d;
}

ArnoldiResult arnoldi_basis(const SparseLTISystem& sys, Index r,
                            double sigma0) {
  if (sys.inputs() != 1)
    throw ConfigError("arnoldi_basis: single-input system required");
  if (r < 1 || r > sys.n())
    throw ConfigError("arnoldi_basis: order out of range");

  SparseMatrix m = sigma0 * sys.E - sys.A;
  m.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success)
    throw NumericalError("arnoldi_basis: shift pencil is singular");

  const Index n = sys.n();
  ArnoldiResult res;
  res.requested = r;
  res.v.resize(n, r);

  Vector q = lu.solve(Vector(sys.B.col(0)));
  const double q0 = q.norm();
  if (q0 == 0.0)
    throw NumericalError("arnoldi_basis: zero starting vector");
  res.v.col(0) = q / q0;

  for (Index k = 1; k < r; ++k) {
    Vector w = lu.solve(Vector(sys.E * res.v.col(k - 1)));
    const double pre = w.norm();
    // Modified Gram-Schmidt, twice for orthogonality to working precision.
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < k; ++j)
        w -= res.v.col(j).dot(w) * res.v.col(j);
    const double h = w.norm();
    if (h <= 1e-12 * pre || pre == 0.0) {
      res.v.conservativeResize(n, k);
      res.deflated = true;
      return res;
    }
    res.v.col(k) = w / h;
  }
  return res;
}

namespace {

/// Real interpolation basis for a conjugation-closed shift set: one column
/// per real shift, a [Re, Im] column pair per complex-conjugate pair.
Matrix interpolation_basis(const ComplexSparse& e, const ComplexSparse& a,
                           const Vector& b,
                           const std::vector<Complex>& shifts) {
  const Index n = e.rows();
  Matrix v(n, static_cast<Index>(shifts.size()));
  Index col = 0;

  std::vector<Complex> sorted = shifts;
  std::sort(sorted.begin(), sorted.end(), shift_less);

  Eigen::SparseLU<ComplexSparse> lu;
  const ComplexVector bc = b.cast<Complex>();
  std::size_t k = 0;
  while (k < sorted.size()) {
    const Complex s = sorted[k];
    if (effectively_real(s)) {
      ComplexSparse m = Complex(s.real(), 0.0) * e - a;
      m.makeCompressed();
      lu.compute(m);
      if (lu.info() != Eigen::Success)
        throw NumericalError("irka_galerkin: singular shifted pencil");
      v.col(col++) = lu.solve(bc).real();
      ++k;
      continue;
    }
    // Complex shift: its conjugate must be adjacent in canonical order.
    if (k + 1 >= sorted.size() ||
        std::abs(sorted[k + 1] - std::conj(s)) >
            1e-8 * std::max(1.0, std::abs(s))) {
      std::ostringstream msg;
      msg << "irka_galerkin: complex shift (" << s.real() << ", " << s.imag()
          << ") cannot be paired with a conjugate";
      throw NumericalError(msg.str());
    }
    ComplexSparse m = s * e - a;
    m.makeCompressed();
    lu.compute(m);
    if (lu.info() != Eigen::Success)
      throw NumericalError("irka_galerkin: singular shifted pencil");
    const ComplexVector x = lu.solve(bc);
    v.col(col++) = x.real();
    v.col(col++) = x.imag();
    k += 2;
  }
  return v;
}

/// First r Householder directions of a rank-revealing QR. Rational Krylov
/// bases are often ill conditioned, so numerical rank loss is reported via
/// `deflated` instead of failing: the trailing columns are still orthonormal
/// and later shift iterations re-aim them.
Matrix thin_orthonormal(const Matrix& v, Index r, bool& deflated,
                        const char* who) {
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  if (qr.rank() == 0) {
    std::ostringstream msg;
    msg << who << ": interpolation space vanished";
    throw NumericalError(msg.str());
  }
  deflated = qr.rank() < r;
  Matrix q = Matrix::Identity(v.rows(), r);
  q.applyOnTheLeft(qr.householderQ());
  return q;
}

}  // namespace

IrkaResult irka_galerkin(const SparseLTISystem& sys, Index r,
                         const IrkaOptions& opts) {
  if (sys.inputs() != 1 || sys.outputs() != 1)
    throw ConfigError("irka_galerkin: SISO system required");
  if (r < 2) throw ConfigError("irka_galerkin: order must be at least 2");
  if (r > sys.n()) throw ConfigError("irka_galerkin: order exceeds dimension");

  std::vector<Complex> shifts = opts.init_shifts;
  if (shifts.empty()) {
    shifts.resize(r);
    const double l0 = std::log10(opts.shift_min);
    const double l1 = std::log10(opts.shift_max);
    for (Index i = 0; i < r; ++i)
      shifts[i] = std::pow(
          10.0, l0 + (l1 - l0) * static_cast<double>(i) /
                         static_cast<double>(std::max<Index>(r - 1, 1)));
  }
  if (static_cast<Index>(shifts.size()) != r)
    throw ConfigError("irka_galerkin: shift count must equal the order");
  std::sort(shifts.begin(), shifts.end(), shift_less);

  const ComplexSparse ec = sys.E.cast<Complex>();
  const ComplexSparse ac = sys.A.cast<Complex>();
  const Matrix e_dense = sparse_to_dense(sys.E);
  const Matrix a_dense = sparse_to_dense(sys.A);

  IrkaResult res;
  for (int iter = 1; iter <= opts.maxiter; ++iter) {
    res.iterations = iter;
    const Matrix raw = interpolation_basis(ec, ac, sys.B.col(0), shifts);
    res.v = thin_orthonormal(raw, r, res.deflated, "irka_galerkin");

    const Matrix er = res.v.transpose() * (e_dense * res.v);
    const Matrix ar = res.v.transpose() * (a_dense * res.v);
    Eigen::PartialPivLU<Matrix> lu(er);
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0)
      throw NumericalError("irka_galerkin: reduced mass matrix singular");
    Eigen::EigenSolver<Matrix> es(lu.solve(ar));
    if (es.info() != Eigen::Success)
      throw NumericalError("irka_galerkin: reduced eigenvalue solve failed");

    std::vector<Complex> next(r);
    for (Index i = 0; i < r; ++i) {
      Complex sigma = -es.eigenvalues()[i];
      const double floor_re =
          1e-8 * std::max(1.0, std::abs(es.eigenvalues()[i]));
      sigma = Complex(std::max(std::abs(sigma.real()), floor_re),
                      sigma.imag());
      next[i] = sigma;
    }
    std::sort(next.begin(), next.end(), shift_less);

    double delta = 0.0;
    for (Index i = 0; i < r; ++i)
      delta = std::max(delta, std::abs(next[i] - shifts[i]) /
                                  std::max(std::abs(shifts[i]), 1e-300));
    shifts = next;
    if (delta <= opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.shifts = shifts;
  return res;
}

namespace {

struct ExplicitPair {
  Matrix a, b;
};

ExplicitPair to_explicit(const LTISystem& sys, const char* who) {
  ExplicitPair ex;
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

}  // namespace

BtSweep bt_prepare(const LTISystem& sys, Index max_dim) {
  const Index n = sys.n();
  if (n > max_dim) {
    std::ostringstream msg;
    msg << "balanced_truncation: dimension " << n
        << " exceeds the dense-solve cap " << max_dim
        << " (raise the cap to override)";
    throw ConfigError(msg.str());
  }
  if (n < 1) throw ConfigError("balanced_truncation: empty system");

  const ExplicitPair ex = to_explicit(sys, "balanced_truncation");
  const SchurForm schur = real_schur(ex.a);
  {
    const ComplexVector eigs = schur_eigenvalues(schur.T);
    for (Index i = 0; i < eigs.size(); ++i)
      if (!(eigs[i].real() < 0.0))
        throw NumericalError(
            "balanced_truncation: system is not asymptotically stable");
  }

  const Matrix zc = lyapunov_factor(schur, ex.b);
  const Matrix zq = lyapunov_factor(transposed_schur(schur),
                                    Matrix(sys.C.transpose()));

  Eigen::BDCSVD<Matrix> svd(zq.transpose() * zc,
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  BtSweep sweep;
  sweep.hankel = svd.singularValues();

  const double smax = sweep.hankel.size() > 0 ? sweep.hankel[0] : 0.0;
  const double floor_sv =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * smax;
  Index rank = 0;
  while (rank < sweep.hankel.size() && sweep.hankel[rank] > floor_sv) ++rank;
  if (rank < 1)
    throw NumericalError("balanced_truncation: Hankel spectrum is zero");
  sweep.rank = rank;

  // Balancing columns scale independently, so the rank-sized realization is
  // computed once and every smaller order is a leading principal slice.
  const Vector s_inv_sqrt =
      sweep.hankel.head(rank).cwiseSqrt().cwiseInverse();
  sweep.v = zc * svd.matrixV().leftCols(rank) * s_inv_sqrt.asDiagonal();
  Matrix w_expl = zq * svd.matrixU().leftCols(rank) * s_inv_sqrt.asDiagonal();

  sweep.a_hat = w_expl.transpose() * (ex.a * sweep.v);
  sweep.b_hat = w_expl.transpose() * ex.b;
  sweep.c_hat = sys.C * sweep.v;
  sweep.d = sys.D;

  if (sys.E.isIdentity(0.0)) {
    sweep.w = std::move(w_expl);
  } else {
    sweep.w = sys.E.transpose().partialPivLu().solve(w_expl);
  }
  return sweep;
}

BtResult bt_slice(const BtSweep& sweep, Index r) {
  if (r < 1) throw ConfigError("balanced_truncation: order out of range");
  if (r > sweep.rank) {
    std::ostringstream msg;
    msg << "balanced_truncation: order " << r
        << " exceeds the numerical rank " << sweep.rank
        << " of the Hankel spectrum";
    throw NumericalError(msg.str());
  }
  BtResult res;
  res.hankel = sweep.hankel;
  res.rom.E = Matrix::Identity(r, r);
  res.rom.A = sweep.a_hat.topLeftCorner(r, r);
  res.rom.B = sweep.b_hat.topRows(r);
  res.rom.C = sweep.c_hat.leftCols(r);
  res.rom.D = sweep.d;
  res.v = sweep.v.leftCols(r);
  res.w = sweep.w.leftCols(r);
  return res;
}

BtResult balanced_truncation(const LTISystem& sys, Index r, Index max_dim) {
  if (r < 1 || r > sys.n())
    throw ConfigError("balanced_truncation: order out of range");
  return bt_slice(bt_prepare(sys, max_dim), r);
}

ReducedPHSystem galerkin_reduce(const SGSystem& sg, const Matrix& v) {
  if (v.rows() != sg.ns())
    throw ConfigError("galerkin_reduce: basis row count mismatch");
  const Index r = v.cols();
  if (r < 1 || r > sg.ns())
    throw ConfigError("galerkin_reduce: order out of range");
  const double ortho =
      (v.transpose() * v - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (ortho > 1e-8)
    throw ConfigError("galerkin_reduce: V is not orthonormal");

  ReducedPHSystem red;
  red.v = v;
  red.rom.n = r;
  red.rom.m = sg.ms();
  red.rom.E = v.transpose() * (sg.E * v);
  red.rom.J = v.transpose() * (sg.J * v);
  red.rom.R = v.transpose() * (sg.R * v);
  red.rom.B = v.transpose() * Matrix(sg.B);
  red.rom.P = v.transpose() * Matrix(sg.P);
  red.rom.S = Matrix(sg.S);
  red.rom.N = Matrix(sg.N);
  return red;
}

ReducedLTISystem petrov_reduce(const LTISystem& sys, const Matrix& v,
                               const Matrix& w) {
  if (v.rows() != sys.n() || w.rows() != sys.n() || v.cols() != w.cols())
    throw ConfigError("petrov_reduce: projection dimensions mismatch");
  Eigen::FullPivLU<Matrix> lu(w.transpose() * v);
  if (!lu.isInvertible())
    throw NumericalError("petrov_reduce: W^T V is rank deficient");
  ReducedLTISystem rom;
  rom.E = w.transpose() * sys.E * v;
  rom.A = w.transpose() * sys.A * v;
  rom.B = w.transpose() * sys.B;
  rom.C = sys.C * v;
  rom.D = sys.D;
  return rom;
}

ReducedLTISystem petrov_reduce(const SparseLTISystem& sys, const Matrix& v,
                               const Matrix& w) {
  if (v.rows() != sys.n() || w.rows() != sys.n() || v.cols() != w.cols())
    throw ConfigError("petrov_reduce: projection dimensions mismatch");
  Eigen::FullPivLU<Matrix> lu(w.transpose() * v);
  if (!lu.isInvertible())
    throw NumericalError("petrov_reduce: W^T V is rank deficient");
  ReducedLTISystem rom;
  rom.E = w.transpose() * (sys.E * v);
  rom.A = w.transpose() * (sys.A * v);
  rom.B = w.transpose() * sys.B;
  rom.C = sys.C * v;
  rom.D = sys.D;
  return rom;
}

}  // namespace phsg
