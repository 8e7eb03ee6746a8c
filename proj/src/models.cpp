// SPDX-License-Identifier: Apache-2.0

#include "phsg/models.hpp"

#include <cmath>

namespace phsg {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string("non-positive parameter: ") + what);
}

}  // namespace

PHSystem dc_motor(const MotorParams& p) {
  require_positive(p.L, "L");
  require_positive(p.R, "R");
  require_positive(p.K, "K");
  require_positive(p.B, "B");
  require_positive(p.J, "J");

  PHSystem sys = PHSystem::identity(2, 1);
  sys.J << 0.0, -p.K,
           p.K, 0.0;
  sys.R = Vector({{p.R, p.B}}).asDiagonal();
  sys.Q = Vector({{1.0 / p.L, 1.0 / p.J}}).asDiagonal();
  sys.B << 1.0, 0.0;
  return sys;
}

LadderParams LadderParams::uniform(int k, double c, double l, double r) {
  LadderParams p;
  p.k = k;
  p.C = Vector::Constant(k, c);
  p.L = Vector::Constant(k, l);
  p.R = Vector::Constant(k, r);
  return p;
}

PHSystem rlc_ladder(const LadderParams& p) {
  if (p.k < 1) throw ConfigError("rlc_ladder: need k >= 1");
  if (p.C.size() != p.k || p.L.size() != p.k || p.R.size() != p.k)
    throw ConfigError("rlc_ladder: parameter vectors must have length k");
  for (int i = 0; i < p.k; ++i) {
    require_positive(p.C[i], "C");
    require_positive(p.L[i], "L");
    require_positive(p.R[i], "R");
  }

  const Index n = 2 * p.k;
  PHSystem sys = PHSystem::identity(n, 1);
  for (Index i = 0; i + 1 < n; ++i) {
    sys.J(i, i + 1) = -1.0;
    sys.J(i + 1, i) = 1.0;
  }
  for (int i = 0; i < p.k; ++i) {
    sys.R(2 * i + 1, 2 * i + 1) = p.R[i];
    sys.Q(2 * i, 2 * i) = 1.0 / p.C[i];
    sys.Q(2 * i + 1, 2 * i + 1) = 1.0 / p.L[i];
  }
  sys.B(0, 0) = 1.0;
  return sys;
}

ParametricPHSystem parametrize_motor(double variation_pct,
                                     const MotorParams& mean) {
  // Parameter order: mu = (L, R, K, B, J).
  Vector mu_mean(5);
  mu_mean << mean.L, mean.R, mean.K, mean.B, mean.J;

  ParametricPHSystem sys;
  sys.box = ParameterBox::relative(mu_mean, variation_pct);
  sys.n = 2;
  sys.m = 1;
  const int q = 5;

  auto e = [](int i) {
    MultiIndex kappa(5, 0);
    kappa[static_cast<std::size_t>(i)] = 1;
    return kappa;
  };

  PolyMatrix Jp(2, 2, q);
  Matrix Jk(2, 2);
  Jk << 0.0, -1.0, 1.0, 0.0;
  Jp.add_term(e(2), Jk);
  sys.J = ParametricMatrix(Jp);

  PolyMatrix Rp(2, 2, q);
  Matrix Rr = Matrix::Zero(2, 2), Rb = Matrix::Zero(2, 2);
  Rr(0, 0) = 1.0;
  Rb(1, 1) = 1.0;
  Rp.add_term(e(1), Rr);
  Rp.add_term(e(3), Rb);
  sys.R = ParametricMatrix(Rp);

  // Q = diag(1/L, 1/J) is rational in the physical parameters; track the
  // two entries with their one-dimensional dependencies.
  {
    EntrywiseMatrix Qe(2, 2, q);
    ScalarEntry inv_l;
    inv_l.deps = {0};
    inv_l.degrees = {kNonPolynomial};
    inv_l.f = [](const Vector& mu) { return 1.0 / mu[0]; };
    ScalarEntry inv_j;
    inv_j.deps = {4};
    inv_j.degrees = {kNonPolynomial};
    inv_j.f = [](const Vector& mu) { return 1.0 / mu[4]; };
    Qe.set(0, 0, inv_l);
    Qe.set(1, 1, inv_j);
    sys.Q = ParametricMatrix(Qe);
  }

  sys.E = ParametricMatrix::constant(Matrix::Identity(2, 2), q);
  Matrix Bm(2, 1);
  Bm << 1.0, 0.0;
  sys.B = ParametricMatrix::constant(Bm, q);
  sys.P = ParametricMatrix::constant(Matrix::Zero(2, 1), q);
  sys.S = ParametricMatrix::constant(Matrix::Zero(1, 1), q);
  sys.N = ParametricMatrix::constant(Matrix::Zero(1, 1), q);
  return sys;
}

ParametricPHSystem parametrize_ladder(int k, double variation_pct,
                                      const LadderParams& mean_phys) {
  if (k < 1) throw ConfigError("parametrize_ladder: need k >= 1");
  LadderParams mean = mean_phys;
  if (mean.C.size() == 0) mean = LadderParams::uniform(k);
  if (mean.k != k || mean.C.size() != k)
    throw ConfigError("parametrize_ladder: mean parameters for wrong k");

  // Rearranged parameters: mu_i = 1/C_i, mu_{k+i} = 1/L_i, mu_{2k+i} = R_i.
  const int q = 3 * k;
  Vector mu_mean(q);
  for (int i = 0; i < k; ++i) {
    mu_mean[i] = 1.0 / mean.C[i];
    mu_mean[k + i] = 1.0 / mean.L[i];
    mu_mean[2 * k + i] = mean.R[i];
  }

  ParametricPHSystem sys;
  sys.box = ParameterBox::relative(mu_mean, variation_pct);
  sys.n = 2 * k;
  sys.m = 1;
  const Index n = sys.n;

  Matrix Jc = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    Jc(i, i + 1) = -1.0;
    Jc(i + 1, i) = 1.0;
  }
  sys.J = ParametricMatrix::constant(Jc, q);
  sys.E = ParametricMatrix::constant(Matrix::Identity(n, n), q);

  PolyMatrix Rp(n, n, q), Qp(n, n, q);
  for (int i = 0; i < k; ++i) {
    MultiIndex kappa(static_cast<std::size_t>(q), 0);

    Matrix unit = Matrix::Zero(n, n);
    unit(2 * i + 1, 2 * i + 1) = 1.0;
    kappa[static_cast<std::size_t>(2 * k + i)] = 1;
    Rp.add_term(kappa, unit);
    kappa[static_cast<std::size_t>(2 * k + i)] = 0;

    unit.setZero();
    unit(2 * i, 2 * i) = 1.0;
    kappa[static_cast<std::size_t>(i)] = 1;
    Qp.add_term(kappa, unit);
    kappa[static_cast<std::size_t>(i)] = 0;

    unit.setZero();
    unit(2 * i + 1, 2 * i + 1) = 1.0;
    kappa[static_cast<std::size_t>(k + i)] = 1;
    Qp.add_term(kappa, unit);
  }
  sys.R = ParametricMatrix(Rp);
  sys.Q = ParametricMatrix(Qp);

  Matrix Bm = Matrix::Zero(n, 1);
  Bm(0, 0) = 1.0;
  sys.B = ParametricMatrix::constant(Bm, q);
  sys.P = ParametricMatrix::constant(Matrix::Zero(n, 1), q);
  sys.S = ParametricMatrix::constant(Matrix::Zero(1, 1), q);
  sys.N = ParametricMatrix::constant(Matrix::Zero(1, 1), q);
  return sys;
}

std::string ModelPreset::name() const {
  if (kind == ModelKind::Motor) return "motor";
  return "ladder" + std::to_string(k);
}

ModelPreset parse_preset(const std::string& text) {
  ModelPreset preset;
  if (text == "motor") {
    preset.kind = ModelKind::Motor;
    return preset;
  }
  if (text.rfind("ladder", 0) == 0) {
    preset.kind = ModelKind::Ladder;
    preset.k = 5;
    const auto rest = text.substr(6);
    if (!rest.empty()) {
      if (rest.rfind(":k=", 0) != 0)
        throw ConfigError("unknown model preset: " + text);
      try {
        preset.k = std::stoi(rest.substr(3));
      } catch (const std::exception&) {
        throw ConfigError("unknown model preset: " + text);
      }
      if (preset.k < 1) throw ConfigError("ladder preset: need k >= 1");
    }
    return preset;
  }
  throw ConfigError("unknown model preset: " + text);
}

ParametricPHSystem make_model(const ModelPreset& preset, double variation_pct) {
  if (preset.kind == ModelKind::Motor) return parametrize_motor(variation_pct);
  return parametrize_ladder(preset.k, variation_pct);
}

}  // namespace phsg
