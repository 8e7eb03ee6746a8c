// SPDX-License-Identifier: Apache-2.0
//
// Shared scalar/matrix aliases, error types, and numeric helpers.

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phsg {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Invalid user-facing configuration (bad flags, inconsistent dimensions, ...).
/// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (singular pencil, unstable system where stability is
/// required, non-convergent iteration, ...). CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated accumulator. Quadrature sums run over up to ~1e7
/// terms; plain summation would lose ~6 digits, which is fatal for the
/// 1e-12-level algebraic identities this library asserts.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Multi-index of polynomial exponents, one entry per random parameter.
using MultiIndex = std::vector<std::uint8_t>;

[[nodiscard]] inline int multi_index_degree(const MultiIndex& a) noexcept {
  int d = 0;
  for (auto v : a) d += v;
  return d;
}

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept {
    std::size_t h = 1469598103934665603ull;  // FNV-1a
    for (auto v : a) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace phsg
