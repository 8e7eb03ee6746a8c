// SPDX-License-Identifier: Apache-2.0

#include "phsg/ph_system.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace phsg {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw ConfigError(what);
}

void check_dimensions(const PHSystem& sys) {
  const Index n = sys.n, m = sys.m;
  require(n >= 1 && m >= 0, "pH system: n must be >= 1 and m >= 0");
  require(sys.E.rows() == n && sys.E.cols() == n, "pH system: E must be n x n");
  require(sys.J.rows() == n && sys.J.cols() == n, "pH system: J must be n x n");
  require(sys.R.rows() == n && sys.R.cols() == n, "pH system: R must be n x n");
  require(sys.Q.rows() == n && sys.Q.cols() == n, "pH system: Q must be n x n");
  require(sys.B.rows() == n && sys.B.cols() == m, "pH system: B must be n x m");
  require(sys.P.rows() == n && sys.P.cols() == m, "pH system: P must be n x m");
  require(sys.S.rows() == m && sys.S.cols() == m, "pH system: S must be m x m");
  require(sys.N.rows() == m && sys.N.cols() == m, "pH system: N must be m x m");
}

double max_abs(const Matrix& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

/// Smallest eigenvalue of the symmetric part of M.
double min_sym_eigenvalue(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double rcond_estimate(const Matrix& M) {
  if (M.size() == 0) return 1.0;
  Eigen::PartialPivLU<Matrix> lu(M);
  return lu.rcond();
}

}  // namespace

PHSystem PHSystem::identity(Index n, Index m) {
  PHSystem sys;
  sys.n = n;
  sys.m = m;
  sys.E = Matrix::Identity(n, n);
  sys.Q = Matrix::Identity(n, n);
  sys.J = Matrix::Zero(n, n);
  sys.R = Matrix::Zero(n, n);
  sys.B = Matrix::Zero(n, m);
  sys.P = Matrix::Zero(n, m);
  sys.S = Matrix::Zero(m, m);
  sys.N = Matrix::Zero(m, m);
  return sys;
}

PHSystem StandardPHSystem::as_ph() const {
  PHSystem sys;
  sys.n = n;
  sys.m = m;
  sys.E = E;
  sys.J = J;
  sys.R = R;
  sys.Q = Matrix::Identity(n, n);
  sys.B = B;
  sys.P = P;
  sys.S = S;
  sys.N = N;
  return sys;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  auto line = [&os](const char* name, bool ok, double mag) {
    os << "  " << name << ": " << (ok ? "pass" : "FAIL") << " (" << mag << ")\n";
  };
  line("J skew-symmetric", j_skew, j_skew_violation);
  line("N skew-symmetric", n_skew, n_skew_violation);
  line("E^T Q symmetric", eq_symmetric, eq_asymmetry);
  line("E^T Q positive semi-definite", eq_psd, eq_min_eigenvalue);
  line("W positive semi-definite", w_psd, w_min_eigenvalue);
  line("E non-singular", e_nonsingular, e_rcond);
  line("Q non-singular", q_nonsingular, q_rcond);
  return os.str();
}

ValidationReport validate_ph(const PHSystem& sys, double tol) {
  check_dimensions(sys);
  ValidationReport rep;

  rep.j_skew_violation = max_abs(sys.J + sys.J.transpose());
  rep.j_skew = rep.j_skew_violation <= tol * (1.0 + sys.J.norm());
  rep.n_skew_violation = max_abs(sys.N + sys.N.transpose());
  rep.n_skew = rep.n_skew_violation <= tol * (1.0 + sys.N.norm());

  const Matrix EtQ = sys.E.transpose() * sys.Q;
  rep.eq_asymmetry = max_abs(EtQ - EtQ.transpose());
  rep.eq_symmetric = rep.eq_asymmetry <= tol * (1.0 + EtQ.norm());
  rep.eq_min_eigenvalue = min_sym_eigenvalue(EtQ);
  rep.eq_psd = rep.eq_min_eigenvalue >= -tol * (1.0 + EtQ.norm());

  const Index n = sys.n, m = sys.m;
  Matrix W(n + m, n + m);
  W.topLeftCorner(n, n) = sys.Q.transpose() * sys.R * sys.Q;
  W.topRightCorner(n, m) = sys.Q.transpose() * sys.P;
  W.bottomLeftCorner(m, n) = sys.P.transpose() * sys.Q;
  W.bottomRightCorner(m, m) = sys.S;
  rep.w_min_eigenvalue = min_sym_eigenvalue(W);
  rep.w_psd = rep.w_min_eigenvalue >= -tol * (1.0 + W.norm());

  rep.e_rcond = rcond_estimate(sys.E);
  rep.e_nonsingular = rep.e_rcond >= kRcondThreshold;
  rep.q_rcond = rcond_estimate(sys.Q);
  rep.q_nonsingular = rep.q_rcond >= kRcondThreshold;
  return rep;
}

ValidationReport validate_standard(const StandardPHSystem& sys, double tol) {
  return validate_ph(sys.as_ph(), tol);
}

double hamiltonian(const PHSystem& sys, const Vector& x) {
  if (x.size() != sys.n) throw ConfigError("hamiltonian: state size mismatch");
  return 0.5 * x.dot(sys.E.transpose() * (sys.Q * x));
}

double hamiltonian(const StandardPHSystem& sys, const Vector& x) {
  if (x.size() != sys.n) throw ConfigError("hamiltonian: state size mismatch");
  return 0.5 * x.dot(sys.E * x);
}

Matrix symmetric_decomposition(const Matrix& Q, Factorization method) {
  if (Q.rows() != Q.cols()) throw ConfigError("symmetric_decomposition: Q not square");
  const double asym = max_abs(Q - Q.transpose());
  if (asym > 1e-10 * (1.0 + Q.norm()))
    throw NumericalError("symmetric_decomposition: Q is not symmetric");

  if (method == Factorization::Cholesky) {
    Eigen::LLT<Matrix> llt(Q);
    if (llt.info() != Eigen::Success)
      throw NumericalError("symmetric_decomposition: Cholesky failed, Q not SPD");
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Q + Q.transpose()));
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric_decomposition: eigendecomposition failed");
  const Vector lambda = es.eigenvalues();
  if (lambda.minCoeff() <= 0.0)
    throw NumericalError("symmetric_decomposition: Q not positive definite");
  return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

std::pair<StandardPHSystem, Matrix> basis_transform(const PHSystem& sys,
                                                    Factorization method) {
  check_dimensions(sys);
  const Matrix T = symmetric_decomposition(sys.Q, method);

  // E T^{-T} solved as (T X^T = E^T)^T to avoid forming the inverse.
  Eigen::PartialPivLU<Matrix> lu(T);
  const Matrix E_Tinv = lu.solve(sys.E.transpose()).transpose();

  StandardPHSystem out;
  out.n = sys.n;
  out.m = sys.m;
  out.E = T.transpose() * E_Tinv;
  out.J = T.transpose() * sys.J * T;
  out.R = T.transpose() * sys.R * T;
  out.B = T.transpose() * sys.B;
  out.P = T.transpose() * sys.P;
  out.S = sys.S;
  out.N = sys.N;
  return {out, T};
}

StandardPHSystem image_transform(const PHSystem& sys) {
  check_dimensions(sys);
  const double rc = rcond_estimate(sys.Q);
  if (rc < kRcondThreshold)
    throw NumericalError("image_transform: Q numerically singular");

  StandardPHSystem out;
  out.n = sys.n;
  out.m = sys.m;
  out.E = sys.Q.transpose() * sys.E;
  out.J = sys.Q.transpose() * sys.J * sys.Q;
  out.R = sys.Q.transpose() * sys.R * sys.Q;
  out.B = sys.Q.transpose() * sys.B;
  out.P = sys.Q.transpose() * sys.P;
  out.S = sys.S;
  out.N = sys.N;
  return out;
}

LTISystem to_lti(const PHSystem& sys) {
  check_dimensions(sys);
  LTISystem lti;
  lti.E = sys.E;
  lti.A = (sys.J - sys.R) * sys.Q;
  lti.B = sys.B - sys.P;
  lti.C = (sys.B + sys.P).transpose() * sys.Q;
  lti.D = sys.S + sys.N;
  return lti;
}

LTISystem to_lti(const StandardPHSystem& sys) { return to_lti(sys.as_ph()); }

std::vector<double> passivity_residual(const std::vector<double>& hamiltonian,
                                       const std::vector<double>& power,
                                       double dt, int order) {
  if (hamiltonian.size() != power.size())
    throw ConfigError("passivity_residual: trace length mismatch");
  if (hamiltonian.size() < 2)
    throw ConfigError("passivity_residual: need at least 2 samples");
  if (dt <= 0.0) throw ConfigError("passivity_residual: dt must be positive");
  if (order != 2 && order != 4 && order != 6 && order != 8)
    throw ConfigError("passivity_residual: order must be 2, 4, 6 or 8");

  const auto& h = hamiltonian;
  const std::size_t n = h.size();
  const std::size_t half = static_cast<std::size_t>(order / 2);
  if (n < static_cast<std::size_t>(order) + 1) return {};

  std::vector<double> res;
  res.reserve(n - 2 * half);
  for (std::size_t i = half; i + half < n; ++i) {
    double dh = 0.0;
    switch (order) {
      case 2:
        dh = (h[i + 1] - h[i - 1]) / (2.0 * dt);
        break;
      case 4:
        dh = (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) /
             (12.0 * dt);
        break;
      case 6:
        dh = (h[i + 3] - 9.0 * h[i + 2] + 45.0 * h[i + 1] - 45.0 * h[i - 1] +
              9.0 * h[i - 2] - h[i - 3]) /
             (60.0 * dt);
        break;
      default:  // 8
        dh = (-3.0 * h[i + 4] + 32.0 * h[i + 3] - 168.0 * h[i + 2] +
              672.0 * h[i + 1] - 672.0 * h[i - 1] + 168.0 * h[i - 2] -
              32.0 * h[i - 3] + 3.0 * h[i - 4]) /
             (840.0 * dt);
        break;
    }
    res.push_back(dh - power[i]);
  }
  return res;
}

}  // namespace phsg
