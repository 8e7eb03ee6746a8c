// SPDX-License-Identifier: Apache-2.0

#include "phsg/poly_matrix.hpp"

#include <cmath>

namespace phsg {

PolyMatrix PolyMatrix::constant(Matrix value, int q) {
  PolyMatrix p(value.rows(), value.cols(), q);
  if (value.size() != 0 && value.cwiseAbs().maxCoeff() != 0.0)
    p.terms_.emplace(MultiIndex(static_cast<std::size_t>(q), 0),
                     std::move(value));
  return p;
}

PolyMatrix PolyMatrix::monomial(Matrix coefficient, MultiIndex kappa) {
  PolyMatrix p(coefficient.rows(), coefficient.cols(),
               static_cast<int>(kappa.size()));
  p.terms_.emplace(std::move(kappa), std::move(coefficient));
  return p;
}

void PolyMatrix::add_term(const MultiIndex& kappa, const Matrix& coefficient) {
  if (static_cast<int>(kappa.size()) != q_)
    throw ConfigError("PolyMatrix: multi-index dimension mismatch");
  if (coefficient.rows() != rows_ || coefficient.cols() != cols_)
    throw ConfigError("PolyMatrix: coefficient shape mismatch");
  auto [it, inserted] = terms_.emplace(kappa, coefficient);
  if (!inserted) it->second += coefficient;
}

Matrix PolyMatrix::eval(const Vector& mu) const {
  if (mu.size() != q_) throw ConfigError("PolyMatrix: point dimension mismatch");
  Matrix out = Matrix::Zero(rows_, cols_);
  for (const auto& [kappa, coeff] : terms_) {
    double mono = 1.0;
    for (std::size_t j = 0; j < kappa.size(); ++j)
      for (int e = 0; e < kappa[j]; ++e) mono *= mu[static_cast<Index>(j)];
    out += mono * coeff;
  }
  return out;
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix out(cols_, rows_, q_);
  for (const auto& [kappa, coeff] : terms_)
    out.terms_.emplace(kappa, coeff.transpose());
  return out;
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || q_ != other.q_)
    throw ConfigError("PolyMatrix: addition shape mismatch");
  PolyMatrix out = *this;
  for (const auto& [kappa, coeff] : other.terms_) out.add_term(kappa, coeff);
  return out;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& other) const {
  return *this + other.scaled(-1.0);
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& other) const {
  if (cols_ != other.rows_ || q_ != other.q_)
    throw ConfigError("PolyMatrix: product shape mismatch");
  PolyMatrix out(rows_, other.cols_, q_);
  MultiIndex sum(static_cast<std::size_t>(q_), 0);
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : other.terms_) {
      for (std::size_t j = 0; j < sum.size(); ++j)
        sum[j] = static_cast<std::uint8_t>(ka[j] + kb[j]);
      out.add_term(sum, ca * cb);
    }
  }
  return out;
}

PolyMatrix PolyMatrix::scaled(double factor) const {
  PolyMatrix out(rows_, cols_, q_);
  for (const auto& [kappa, coeff] : terms_)
    out.terms_.emplace(kappa, factor * coeff);
  return out;
}

int PolyMatrix::total_degree() const {
  int d = 0;
  for (const auto& [kappa, coeff] : terms_) {
    if (coeff.size() == 0 || coeff.cwiseAbs().maxCoeff() == 0.0) continue;
    d = std::max(d, multi_index_degree(kappa));
  }
  return d;
}

std::vector<std::pair<MultiIndex, double>> PolyMatrix::entry_terms(
    Index k, Index l) const {
  std::vector<std::pair<MultiIndex, double>> out;
  for (const auto& [kappa, coeff] : terms_) {
    const double c = coeff(k, l);
    if (c != 0.0) out.emplace_back(kappa, c);
  }
  return out;
}

}  // namespace phsg
