// SPDX-License-Identifier: Apache-2.0

#include "phsg/chaos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace phsg {

ParameterBox::ParameterBox(Vector lo_, Vector hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size())
    throw ConfigError("ParameterBox: lo/hi size mismatch");
  for (Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i]))
      throw ConfigError("ParameterBox: intervals must be non-degenerate");
}

ParameterBox ParameterBox::relative(const Vector& mean, double variation_pct) {
  if (!(variation_pct > 0.0 && variation_pct < 100.0))
    throw ConfigError("ParameterBox: variation must be in (0, 100) percent");
  const double f = variation_pct / 100.0;
  Vector lo(mean.size()), hi(mean.size());
  for (Index i = 0; i < mean.size(); ++i) {
    const double a = mean[i] * (1.0 - f);
    const double b = mean[i] * (1.0 + f);
    lo[i] = std::min(a, b);
    hi[i] = std::max(a, b);
  }
  return ParameterBox(std::move(lo), std::move(hi));
}

bool ParameterBox::contains(const Vector& mu, double slack) const {
  if (mu.size() != lo.size()) return false;
  for (Index i = 0; i < mu.size(); ++i) {
    const double pad = slack * (1.0 + std::abs(hi[i]) + std::abs(lo[i]));
    if (mu[i] < lo[i] - pad || mu[i] > hi[i] + pad) return false;
  }
  return true;
}

Vector ParameterBox::to_unit(const Vector& mu) const {
  return (2.0 * mu - lo - hi).cwiseQuotient(hi - lo);
}

Vector ParameterBox::from_unit(const Vector& xi) const {
  return center() + half_width().cwiseProduct(xi);
}

long basis_size(int q, int d) {
  if (q < 1 || d < 0) throw ConfigError("basis_size: need q >= 1 and d >= 0");
  // binomial(d + q, q) with overflow guard
  long double acc = 1.0L;
  long result = 1;
  for (int i = 1; i <= q; ++i) {
    acc = acc * (d + i) / i;
    if (acc > static_cast<long double>(std::numeric_limits<long>::max() / 2))
      throw ConfigError("basis_size: overflow");
  }
  result = static_cast<long>(std::llroundl(acc));
  return result;
}

double normalized_legendre(int k, double xi) {
  if (k < 0) throw ConfigError("normalized_legendre: k must be >= 0");
  // Three-term recurrence for the classical P_k, then scale by sqrt(2k+1).
  double pm1 = 1.0, p = xi;
  if (k == 0) return 1.0;
  for (int j = 1; j < k; ++j) {
    const double pn = ((2.0 * j + 1.0) * xi * p - j * pm1) / (j + 1.0);
    pm1 = p;
    p = pn;
  }
  return std::sqrt(2.0 * k + 1.0) * p;
}

void normalized_legendre_row(int k_max, double xi, double* out) {
  out[0] = 1.0;
  if (k_max == 0) return;
  double pm1 = 1.0, p = xi;
  out[1] = std::sqrt(3.0) * p;
  for (int j = 1; j < k_max; ++j) {
    const double pn = ((2.0 * j + 1.0) * xi * p - j * pm1) / (j + 1.0);
    pm1 = p;
    p = pn;
    out[j + 1] = std::sqrt(2.0 * (j + 1) + 1.0) * p;
  }
}

ChaosBasis ChaosBasis::make(int q, int d) {
  if (q < 1 || d < 0) throw ConfigError("ChaosBasis: need q >= 1 and d >= 0");
  ChaosBasis basis;
  basis.q = q;
  basis.d = d;
  basis.indices.reserve(static_cast<std::size_t>(basis_size(q, d)));

  // Enumerate exponent vectors of total degree g in lexicographic order
  // (first component most significant), for g = 0..d.
  MultiIndex alpha(static_cast<std::size_t>(q), 0);
  for (int g = 0; g <= d; ++g) {
    // First vector of degree g in lex-descending... we want lexicographic
    // order on alpha, largest-first component ordering: (g,0,...,0) comes
    // last under ascending lex; convention here: ascending lexicographic,
    // i.e. (0,...,0,g) first. Recursive fill keeps it deterministic.
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
      if (pos == q - 1) {
        alpha[static_cast<std::size_t>(pos)] =
            static_cast<std::uint8_t>(remaining);
        basis.indices.push_back(alpha);
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        alpha[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
        rec(pos + 1, remaining - v);
      }
      alpha[static_cast<std::size_t>(pos)] = 0;
    };
    rec(0, g);
  }

  basis.position_.reserve(basis.indices.size());
  for (std::size_t i = 0; i < basis.indices.size(); ++i)
    basis.position_.emplace(basis.indices[i], static_cast<int>(i));
  return basis;
}

int ChaosBasis::position(const MultiIndex& alpha) const {
  auto it = position_.find(alpha);
  return it == position_.end() ? -1 : it->second;
}

Vector ChaosBasis::eval_unit(const Vector& xi) const {
  if (xi.size() != q) throw ConfigError("ChaosBasis: point dimension mismatch");
  // Univariate value table per dimension, then products per multi-index.
  Matrix table(q, d + 1);
  std::vector<double> buf(static_cast<std::size_t>(d) + 1);
  for (int j = 0; j < q; ++j) {
    normalized_legendre_row(d, xi[j], buf.data());
    for (int k = 0; k <= d; ++k) table(j, k) = buf[static_cast<std::size_t>(k)];
  }

  Vector phi(size());
  for (int i = 0; i < size(); ++i) {
    double v = 1.0;
    const MultiIndex& a = indices[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j)
      if (a[static_cast<std::size_t>(j)] != 0)
        v *= table(j, a[static_cast<std::size_t>(j)]);
    phi[i] = v;
  }
  return phi;
}

Vector ChaosBasis::eval(const ParameterBox& box, const Vector& mu) const {
  if (!box.contains(mu))
    throw ConfigError("ChaosBasis: evaluation point outside parameter box");
  return eval_unit(box.to_unit(mu));
}

void gauss_legendre(int points, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (points < 1) throw ConfigError("gauss_legendre: need at least 1 point");
  // Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
  Matrix Jm = Matrix::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    Jm(i, i - 1) = b;
    Jm(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(Jm);
  nodes.resize(static_cast<std::size_t>(points));
  weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    // Total mass 1: the density 1/2 on [-1,1] integrates to 1.
    weights[static_cast<std::size_t>(i)] = v0 * v0;
  }
  // Enforce exact symmetry of the rule (the eigen-solver is close already).
  for (int i = 0; i < points / 2; ++i) {
    const int jr = points - 1 - i;
    const double x = 0.5 * (nodes[static_cast<std::size_t>(jr)] -
                            nodes[static_cast<std::size_t>(i)]);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(jr)] = x;
    const double w = 0.5 * (weights[static_cast<std::size_t>(i)] +
                            weights[static_cast<std::size_t>(jr)]);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(jr)] = w;
  }
  if (points % 2 == 1) nodes[static_cast<std::size_t>(points / 2)] = 0.0;
}

QuadratureRule QuadratureRule::tensor_gauss(const ParameterBox& box,
                                            int points_per_dim,
                                            std::size_t cap) {
  return tensor_gauss(
      box, std::vector<int>(static_cast<std::size_t>(box.dims()),
                            points_per_dim),
      cap);
}

QuadratureRule QuadratureRule::tensor_gauss(const ParameterBox& box,
                                            const std::vector<int>& points,
                                            std::size_t cap) {
  if (static_cast<int>(points.size()) != box.dims())
    throw ConfigError("QuadratureRule: per-dimension point list size mismatch");
  QuadratureRule rule;
  rule.box = box;
  rule.nodes_1d.resize(points.size());
  rule.weights_1d.resize(points.size());
  long double total = 1.0L;
  for (std::size_t j = 0; j < points.size(); ++j) {
    gauss_legendre(points[j], rule.nodes_1d[j], rule.weights_1d[j]);
    total *= points[j];
    if (total > static_cast<long double>(cap))
      throw ConfigError("QuadratureRule: node count exceeds cap");
  }
  return rule;
}

std::size_t QuadratureRule::count() const {
  std::size_t c = 1;
  for (const auto& n : nodes_1d) c *= n.size();
  return c;
}

void QuadratureRule::node_unit(std::size_t idx, Vector& xi, double& w) const {
  const int q = dims();
  xi.resize(q);
  w = 1.0;
  // Mixed-radix decode, last dimension fastest.
  for (int j = q - 1; j >= 0; --j) {
    const std::size_t nj = nodes_1d[static_cast<std::size_t>(j)].size();
    const std::size_t k = idx % nj;
    idx /= nj;
    xi[j] = nodes_1d[static_cast<std::size_t>(j)][k];
    w *= weights_1d[static_cast<std::size_t>(j)][k];
  }
}

void QuadratureRule::node(std::size_t idx, Vector& mu, double& w) const {
  Vector xi;
  node_unit(idx, xi, w);
  mu = box.from_unit(xi);
}

double expectation(const std::function<double(const Vector&)>& f,
                   const QuadratureRule& rule) {
  CompensatedSum acc;
  const std::size_t n = rule.count();
  Vector mu;
  double w;
  for (std::size_t i = 0; i < n; ++i) {
    rule.node(i, mu, w);
    acc.add(w * f(mu));
  }
  return acc.value();
}

double inner_product(const std::function<double(const Vector&)>& f,
                     const std::function<double(const Vector&)>& g,
                     const QuadratureRule& rule) {
  CompensatedSum acc;
  const std::size_t n = rule.count();
  Vector mu;
  double w;
  for (std::size_t i = 0; i < n; ++i) {
    rule.node(i, mu, w);
    acc.add(w * f(mu) * g(mu));
  }
  return acc.value();
}

PcStatistics pc_statistics(const Vector& coefficients) {
  if (coefficients.size() == 0)
    throw ConfigError("pc_statistics: empty coefficient sequence");
  PcStatistics st;
  st.mean = coefficients[0];
  CompensatedSum var;
  for (Index i = 1; i < coefficients.size(); ++i)
    var.add(coefficients[i] * coefficients[i]);
  st.variance = var.value();
  return st;
}

}  // namespace phsg
