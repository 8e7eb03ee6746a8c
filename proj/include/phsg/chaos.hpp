// SPDX-License-Identifier: Apache-2.0
//
// Multivariate orthonormal Legendre polynomial chaos: parameter boxes with
// uniform densities, graded-lexicographic total-degree bases, and
// tensor-product Gauss-Legendre quadrature normalized against the density.

#pragma once

#include "phsg/types.hpp"

#include <cstddef>
#include <functional>
#include <unordered_map>
#include <vector>

namespace phsg {

/// Axis-aligned box of independent, uniformly distributed parameters.
struct ParameterBox {
  Vector lo, hi;

  ParameterBox() = default;
  ParameterBox(Vector lo_, Vector hi_);

  /// Box [mean_i (1 - pct/100), mean_i (1 + pct/100)] per dimension.
  static ParameterBox relative(const Vector& mean, double variation_pct);

  [[nodiscard]] int dims() const { return static_cast<int>(lo.size()); }
  [[nodiscard]] Vector center() const { return 0.5 * (lo + hi); }
  [[nodiscard]] Vector half_width() const { return 0.5 * (hi - lo); }
  [[nodiscard]] bool contains(const Vector& mu, double slack = 1e-12) const;

  /// Affine map of a point into the reference cube [-1, 1]^q and back.
  [[nodiscard]] Vector to_unit(const Vector& mu) const;
  [[nodiscard]] Vector from_unit(const Vector& xi) const;
};

/// Number of multivariate polynomials of total degree <= d in q variables,
/// i.e. binomial(d + q, q). Throws ConfigError on overflow.
long basis_size(int q, int d);

/// Orthonormal Legendre polynomial sqrt(2k+1) P_k(xi) for the density 1/2
/// on [-1, 1].
double normalized_legendre(int k, double xi);

/// Values of the orthonormal Legendre polynomials 0..k_max at xi.
void normalized_legendre_row(int k_max, double xi, double* out);

/// Total-degree multivariate basis in graded lexicographic order: sorted by
/// total degree first, lexicographically on the exponent vector within each
/// degree. The first element is the zero multi-index (constant polynomial 1).
struct ChaosBasis {
  int q = 0;  ///< number of parameters
  int d = 0;  ///< maximal total degree
  std::vector<MultiIndex> indices;

  static ChaosBasis make(int q, int d);

  [[nodiscard]] int size() const { return static_cast<int>(indices.size()); }

  /// Position (0-based) of a multi-index, or -1 if |alpha| > d.
  [[nodiscard]] int position(const MultiIndex& alpha) const;

  /// Evaluate all basis polynomials at the reference point xi in [-1,1]^q.
  [[nodiscard]] Vector eval_unit(const Vector& xi) const;

  /// Evaluate at a physical point of the box (affine map, then eval_unit).
  [[nodiscard]] Vector eval(const ParameterBox& box, const Vector& mu) const;

 private:
  std::unordered_map<MultiIndex, int, MultiIndexHash> position_;
};

/// Tensor-product quadrature with per-dimension Gauss-Legendre rules. Nodes
/// are never materialized as a full list: they are decoded on demand from the
/// per-dimension 1-D rules (the grid may have millions of points). Weights
/// are normalized so they sum to 1 (quadrature of the uniform density).
struct QuadratureRule {
  ParameterBox box;
  std::vector<std::vector<double>> nodes_1d;    ///< per dim, on [-1,1]
  std::vector<std::vector<double>> weights_1d;  ///< per dim, sum to 1

  /// Same number of Gauss points in every dimension; exact for per-dimension
  /// polynomial degree <= 2*points_per_dim - 1. Throws ConfigError if the
  /// total node count exceeds `cap`.
  static QuadratureRule tensor_gauss(const ParameterBox& box,
                                     int points_per_dim,
                                     std::size_t cap = 10'000'000);

  /// Per-dimension point counts (anisotropic rule).
  static QuadratureRule tensor_gauss(const ParameterBox& box,
                                     const std::vector<int>& points,
                                     std::size_t cap = 10'000'000);

  [[nodiscard]] int dims() const { return static_cast<int>(nodes_1d.size()); }
  [[nodiscard]] std::size_t count() const;

  /// Decode node `idx` (mixed-radix over dimensions, last dimension fastest)
  /// into its physical point and weight.
  void node(std::size_t idx, Vector& mu, double& w) const;

  /// Reference-cube coordinates of node `idx`.
  void node_unit(std::size_t idx, Vector& xi, double& w) const;
};

/// 1-D Gauss-Legendre rule on [-1,1] with weights normalized to sum 1
/// (i.e. quadrature for the density 1/2).
void gauss_legendre(int points, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Compensated quadrature sum of f over the rule's nodes.
double expectation(const std::function<double(const Vector&)>& f,
                   const QuadratureRule& rule);

/// Compensated quadrature sum of f*g.
double inner_product(const std::function<double(const Vector&)>& f,
                     const std::function<double(const Vector&)>& g,
                     const QuadratureRule& rule);

/// Mean/variance of a polynomial-chaos coefficient sequence: the mean is the
/// first coefficient, the variance the sum of squares of the others.
struct PcStatistics {
  double mean = 0.0;
  double variance = 0.0;
};
PcStatistics pc_statistics(const Vector& coefficients);

}  // namespace phsg
