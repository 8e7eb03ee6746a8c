// SPDX-License-Identifier: Apache-2.0
//
// Matrix-valued multivariate polynomials: finite sums  A(mu) = sum_kappa
// C_kappa mu^kappa with matrix coefficients, indexed by exponent
// multi-indices. Used to carry exact degree/dependence metadata through the
// equivalence transformations so that Galerkin projections of polynomial
// matrices can be assembled with exact quadrature.

#pragma once

#include "phsg/types.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace phsg {

class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(Index rows, Index cols, int q)
      : rows_(rows), cols_(cols), q_(q) {}

  static PolyMatrix constant(Matrix value, int q);
  static PolyMatrix monomial(Matrix coefficient, MultiIndex kappa);

  [[nodiscard]] Index rows() const { return rows_; }
  [[nodiscard]] Index cols() const { return cols_; }
  [[nodiscard]] int dims() const { return q_; }

  /// Accumulate a term C * mu^kappa.
  void add_term(const MultiIndex& kappa, const Matrix& coefficient);

  [[nodiscard]] Matrix eval(const Vector& mu) const;

  [[nodiscard]] PolyMatrix transpose() const;
  [[nodiscard]] PolyMatrix operator+(const PolyMatrix& other) const;
  [[nodiscard]] PolyMatrix operator-(const PolyMatrix& other) const;
  [[nodiscard]] PolyMatrix operator*(const PolyMatrix& other) const;
  [[nodiscard]] PolyMatrix scaled(double factor) const;

  /// Maximal total degree over all stored terms (0 for the zero/constant
  /// polynomial).
  [[nodiscard]] int total_degree() const;

  /// Scalar terms (kappa, coefficient) of entry (k, l); exact zeros skipped.
  [[nodiscard]] std::vector<std::pair<MultiIndex, double>> entry_terms(
      Index k, Index l) const;

  /// Deterministically ordered map of all terms.
  [[nodiscard]] const std::map<MultiIndex, Matrix>& terms() const {
    return terms_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  int q_ = 0;
  std::map<MultiIndex, Matrix> terms_;
};

}  // namespace phsg
