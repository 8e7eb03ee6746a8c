// SPDX-License-Identifier: Apache-2.0

#include "phsg/lyap.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace phsg {
namespace {

/// Starting row/column of each 1x1 or 2x2 diagonal block of a quasi
/// upper-triangular matrix.
std::vector<Index> block_starts(const Eigen::Ref<const Matrix>& T) {
  std::vector<Index> starts;
  const Index n = T.rows();
  Index k = 0;
  while (k < n) {
    starts.push_back(k);
    k += (k + 1 < n && T(k + 1, k) != 0.0) ? 2 : 1;
  }
  return starts;
}

Index block_size(const std::vector<Index>& starts, std::size_t b, Index n) {
  return (b + 1 < starts.size() ? starts[b + 1] : n) - starts[b];
}

/// Solve the small (<= 4x4) Kronecker system
///   (I (x) TA_ii + TB_jj (x) I) vec(Y) = vec(G)
/// for one block pair, writing Y into `out`.
void solve_block(const Eigen::Ref<const Matrix>& taii,
                 const Eigen::Ref<const Matrix>& tbjj, const Matrix& g,
                 Eigen::Ref<Matrix> out, bool trans_a, bool trans_b) {
  const Index bi = taii.rows();
  const Index bj = tbjj.rows();
  Matrix k = Matrix::Zero(bi * bj, bi * bj);
  for (Index c = 0; c < bj; ++c) {
    if (trans_a)
      k.block(c * bi, c * bi, bi, bi) = taii.transpose();
    else
      k.block(c * bi, c * bi, bi, bi) = taii;
  }
  for (Index c = 0; c < bj; ++c)
    for (Index cp = 0; cp < bj; ++cp) {
      const double tb = trans_b ? tbjj(cp, c) : tbjj(c, cp);
      k.block(c * bi, cp * bi, bi, bi) +=
          tb * Matrix::Identity(bi, bi);
    }
  Eigen::FullPivLU<Matrix> lu(k);
  if (!lu.isInvertible())
    throw NumericalError(
        "sylvester_solve: singular block system (spectra not separated)");
  Vector g_vec(bi * bj);
  for (Index c = 0; c < bj; ++c) g_vec.segment(c * bi, bi) = g.col(c);
  const Vector y = lu.solve(g_vec);
  for (Index c = 0; c < bj; ++c) out.col(c) = y.segment(c * bi, bi);
}

/// In-place solve of TA Y + Y TB^T = C with TA, TB quasi upper-triangular.
/// Sweeps block columns and rows from last to first.
void solve_quasi_forward(const Eigen::Ref<const Matrix>& ta,
                         const Eigen::Ref<const Matrix>& tb, Matrix& c) {
  const Index na = ta.rows();
  const Index nb = tb.rows();
  const auto sa = block_starts(ta);
  const auto sb = block_starts(tb);

  for (std::size_t jb = sb.size(); jb-- > 0;) {
    const Index j0 = sb[jb];
    const Index bj = block_size(sb, jb, nb);
    const Index jr = j0 + bj;  // first already-solved column
    if (jr < nb)
      c.middleCols(j0, bj).noalias() -=
          c.rightCols(nb - jr) * tb.block(j0, jr, bj, nb - jr).transpose();
    for (std::size_t ib = sa.size(); ib-- > 0;) {
      const Index i0 = sa[ib];
      const Index bi = block_size(sa, ib, na);
      const Index ir = i0 + bi;
      Matrix g = c.block(i0, j0, bi, bj);
      if (ir < na)
        g.noalias() -= ta.block(i0, ir, bi, na - ir) * c.block(ir, j0, na - ir, bj);
      solve_block(ta.block(i0, i0, bi, bi), tb.block(j0, j0, bj, bj), g,
                  c.block(i0, j0, bi, bj), false, false);
    }
  }
}

/// In-place solve of TA^T Y + Y TB = C; sweeps first to last.
void solve_quasi_transposed(const Eigen::Ref<const Matrix>& ta,
                            const Eigen::Ref<const Matrix>& tb, Matrix& c) {
  const Index na = ta.rows();
  const Index nb = tb.rows();
  const auto sa = block_starts(ta);
  const auto sb = block_starts(tb);

  for (std::size_t jb = 0; jb < sb.size(); ++jb) {
    const Index j0 = sb[jb];
    const Index bj = block_size(sb, jb, nb);
    if (j0 > 0)
      c.middleCols(j0, bj).noalias() -= c.leftCols(j0) * tb.block(0, j0, j0, bj);
    for (std::size_t ib = 0; ib < sa.size(); ++ib) {
      const Index i0 = sa[ib];
      const Index bi = block_size(sa, ib, na);
      Matrix g = c.block(i0, j0, bi, bj);
      if (i0 > 0)
        g.noalias() -= ta.block(0, i0, i0, bi).transpose() * c.block(0, j0, i0, bj);
      solve_block(ta.block(i0, i0, bi, bi), tb.block(j0, j0, bj, bj), g,
                  c.block(i0, j0, bi, bj), true, true);
    }
  }
}

}  // namespace

SchurForm real_schur(const Matrix& A) {
  if (A.rows() != A.cols()) throw ConfigError("real_schur: matrix not square");
  Eigen::RealSchur<Matrix> rs(A);
  if (rs.info() != Eigen::Success)
    throw NumericalError("real_schur: iteration did not converge");
  return SchurForm{rs.matrixU(), rs.matrixT()};
}

ComplexVector schur_eigenvalues(const Matrix& T) {
  const Index n = T.rows();
  ComplexVector ev(n);
  Index k = 0;
  while (k < n) {
    if (k + 1 < n && T(k + 1, k) != 0.0) {
      const double a = T(k, k), b = T(k, k + 1);
      const double c = T(k + 1, k), d = T(k + 1, k + 1);
      const double mean = 0.5 * (a + d);
      const double disc = 0.25 * (a - d) * (a - d) + b * c;
      if (disc < 0.0) {
        const double im = std::sqrt(-disc);
        ev[k] = {mean, im};
        ev[k + 1] = {mean, -im};
      } else {
        const double root = std::sqrt(disc);
        ev[k] = {mean + root, 0.0};
        ev[k + 1] = {mean - root, 0.0};
      }
      k += 2;
    } else {
      ev[k] = {T(k, k), 0.0};
      k += 1;
    }
  }
  return ev;
}

Matrix sylvester_solve(const SchurForm& a, const SchurForm& b,
                       const Matrix& W) {
  if (W.rows() != a.T.rows() || W.cols() != b.T.rows())
    throw ConfigError("sylvester_solve: dimension mismatch");
  Matrix c = -(a.U.transpose() * W * b.U);
  solve_quasi_forward(a.T, b.T, c);
  return a.U * c * b.U.transpose();
}

Matrix lyapunov_solve(const SchurForm& a, const Matrix& W) {
  if (W.rows() != a.T.rows() || W.cols() != a.T.rows())
    throw ConfigError("lyapunov_solve: dimension mismatch");
  Matrix c = -(a.U.transpose() * W * a.U);
  solve_quasi_forward(a.T, a.T, c);
  Matrix x = a.U * c * a.U.transpose();
  return 0.5 * (x + x.transpose());
}

Matrix lyapunov_solve_transposed(const SchurForm& a, const Matrix& W) {
  if (W.rows() != a.T.rows() || W.cols() != a.T.rows())
    throw ConfigError("lyapunov_solve_transposed: dimension mismatch");
  Matrix c = -(a.U.transpose() * W * a.U);
  solve_quasi_transposed(a.T, a.T, c);
  Matrix x = a.U * c * a.U.transpose();
  return 0.5 * (x + x.transpose());
}

SchurForm transposed_schur(const SchurForm& a) {
  // A = U T U^T implies A^T = (U J)(J T^T J)(U J)^T with J the reversal
  // permutation; J T^T J is again quasi upper-triangular.
  SchurForm t;
  t.U = a.U.rowwise().reverse();
  t.T = a.T.transpose().reverse();
  return t;
}

namespace {

/// Clamped lower Cholesky factor of a (near-)PSD k x k matrix, k <= 2.
Matrix chol_small(const Matrix& p) {
  const Index k = p.rows();
  Matrix l = Matrix::Zero(k, k);
  l(0, 0) = std::sqrt(std::max(p(0, 0), 0.0));
  if (k == 2) {
    l(1, 0) = l(0, 0) > 0.0 ? p(1, 0) / l(0, 0) : 0.0;
    l(1, 1) = std::sqrt(std::max(p(1, 1) - l(1, 0) * l(1, 0), 0.0));
  }
  return l;
}

}  // namespace

Matrix lyapunov_factor(const SchurForm& a, const Matrix& B) {
  const Index n = a.T.rows();
  if (B.rows() != n) throw ConfigError("lyapunov_factor: dimension mismatch");

  Matrix bt = a.U.transpose() * B;  // running right-hand-side factor
  Matrix l = Matrix::Zero(n, n);
  const auto starts = block_starts(a.T);

  for (std::size_t jb = starts.size(); jb-- > 0;) {
    const Index j0 = starts[jb];
    const Index k = block_size(starts, jb, n);
    const auto tau = a.T.block(j0, j0, k, k);
    const auto b2 = bt.middleRows(j0, k);

    if (b2.norm() == 0.0) continue;  // unreachable block: zero columns

    // Trailing Gramian block and its clamped Cholesky factor.
    Matrix p22(k, k);
    {
      Matrix g = -(b2 * b2.transpose());
      solve_block(tau, tau, g, p22, false, false);
    }
    const Matrix l22 = chol_small(p22);
    l.block(j0, j0, k, k) = l22;

    if (j0 > 0) {
      const auto t11 = a.T.topLeftCorner(j0, j0);
      const auto t12 = a.T.block(0, j0, j0, k);
      const auto b1 = bt.topRows(j0);

      // Off-diagonal Gramian block: T11 p12 + p12 tau^T = rhs.
      Matrix p12 = -(t12 * p22 + b1 * b2.transpose());
      solve_quasi_forward(t11, tau, p12);

      // u = p12 l22^{-T}, c = l22^{-1} b2, with zero columns where the
      // factor's diagonal vanishes (semidefinite directions).
      Matrix u(j0, k);
      Matrix c(k, bt.cols());
      if (l22(0, 0) > 0.0) {
        u.col(0) = p12.col(0) / l22(0, 0);
        c.row(0) = b2.row(0) / l22(0, 0);
      } else {
        u.col(0).setZero();
        c.row(0).setZero();
      }
      if (k == 2) {
        if (l22(1, 1) > 0.0) {
          u.col(1) = (p12.col(1) - l22(1, 0) * u.col(0)) / l22(1, 1);
          c.row(1) = (b2.row(1) - l22(1, 0) * c.row(0)) / l22(1, 1);
        } else {
          u.col(1).setZero();
          c.row(1).setZero();
        }
      }
      l.block(0, j0, j0, k) = u;
      bt.topRows(j0).noalias() -= u * c;
    }
  }
  return a.U * l;
}

}  // namespace phsg
