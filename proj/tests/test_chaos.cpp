// SPDX-License-Identifier: Apache-2.0
//
// Chaos-basis layer: counting formula, graded-lexicographic ordering,
// orthonormal Legendre values, Gauss rules, tensor quadrature decoding, and
// the compensated expectation helpers.

#include "phsg/chaos.hpp"
#include "phsg/types.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace phsg;

namespace {

double legendre_p(int k, double x) {
  // Three-term recurrence for the classical (unnormalized) polynomials.
  double p0 = 1.0, p1 = x;
  if (k == 0) return p0;
  if (k == 1) return p1;
  for (int n = 2; n <= k; ++n) {
    const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

TEST_CASE("basis size matches the closed-form binomial count") {
  // Five random parameters (the motor benchmark layout).
  CHECK(basis_size(5, 1) == 6);
  CHECK(basis_size(5, 2) == 21);
  CHECK(basis_size(5, 3) == 56);
  CHECK(basis_size(5, 4) == 126);
  CHECK(basis_size(5, 5) == 252);
  CHECK(basis_size(5, 6) == 462);
  // Fifteen random parameters (the ladder benchmark layout).
  CHECK(basis_size(15, 2) == 136);
  CHECK(basis_size(15, 3) == 816);
  // Degenerate shapes.
  CHECK(basis_size(1, 7) == 8);
  CHECK(basis_size(9, 0) == 1);
  CHECK_THROWS_AS(basis_size(64, 64), ConfigError);
}

TEST_CASE("basis enumeration is graded lexicographic") {
  const ChaosBasis b = ChaosBasis::make(2, 2);
  REQUIRE(b.size() == 6);
  const std::vector<MultiIndex> expected = {
      {0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(b.indices[i] == expected[i]);
  }
  for (int i = 0; i < b.size(); ++i) {
    CHECK(b.position(b.indices[static_cast<std::size_t>(i)]) == i);
  }
  CHECK(b.position({3, 0}) == -1);  // beyond the stored degree

  // Degrees are non-decreasing along the enumeration.
  const ChaosBasis big = ChaosBasis::make(4, 3);
  CHECK(big.size() == basis_size(4, 3));
  for (std::size_t i = 1; i < big.indices.size(); ++i) {
    CHECK(multi_index_degree(big.indices[i - 1]) <=
          multi_index_degree(big.indices[i]));
  }
}

TEST_CASE("normalized Legendre values match the classical recurrence") {
  for (double xi : {-0.9, -0.35, 0.0, 0.2, 0.77, 1.0}) {
    for (int k = 0; k <= 8; ++k) {
      const double expect = std::sqrt(2.0 * k + 1.0) * legendre_p(k, xi);
      CHECK(normalized_legendre(k, xi) ==
            doctest::Approx(expect).epsilon(1e-14));
    }
    double row[9];
    normalized_legendre_row(8, xi, row);
    for (int k = 0; k <= 8; ++k) {
      CHECK(row[k] == normalized_legendre(k, xi));
    }
  }
}

TEST_CASE("normalized Legendre family is orthonormal for the density 1/2") {
  std::vector<double> nodes, weights;
  gauss_legendre(24, nodes, weights);
  for (int k = 0; k <= 10; ++k) {
    for (int l = k; l <= 10; ++l) {
      CompensatedSum acc;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        acc.add(weights[j] * normalized_legendre(k, nodes[j]) *
                normalized_legendre(l, nodes[j]));
      }
      const double expect = (k == l) ? 1.0 : 0.0;
      CHECK(std::abs(acc.value() - expect) <= 1e-13);
    }
  }
}

TEST_CASE("1-D Gauss rule integrates the density exactly") {
  std::vector<double> nodes, weights;
  gauss_legendre(5, nodes, weights);
  REQUIRE(nodes.size() == 5);
  double wsum = 0.0;
  for (double w : weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));

  // Moments of the uniform density on [-1, 1]: E[x^p] = 1/(p+1) for even p,
  // 0 for odd p; a 5-point rule is exact through degree 9.
  for (int p = 0; p <= 9; ++p) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      acc.add(weights[j] * std::pow(nodes[j], p));
    }
    const double expect = (p % 2 == 0) ? 1.0 / (p + 1) : 0.0;
    CHECK(std::abs(acc.value() - expect) <= 1e-15);
  }
}

TEST_CASE("parameter box maps and containment") {
  Vector mean(3);
  mean << 10.0, -4.0, 0.5;
  const ParameterBox box = ParameterBox::relative(mean, 10.0);
  CHECK(box.lo[0] == doctest::Approx(9.0));
  CHECK(box.hi[0] == doctest::Approx(11.0));
  CHECK(box.lo[1] == doctest::Approx(-4.4));  // negative mean widens downward
  CHECK(box.hi[1] == doctest::Approx(-3.6));
  CHECK(box.center().isApprox(mean, 1e-14));

  Vector mu(3);
  mu << 10.5, -4.2, 0.46;
  CHECK(box.contains(mu));
  const Vector xi = box.to_unit(mu);
  CHECK(xi.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  CHECK(box.from_unit(xi).isApprox(mu, 1e-13));

  mu[2] = 0.7;
  CHECK(!box.contains(mu));
}

TEST_CASE("tensor rule decodes nodes with the last dimension fastest") {
  Vector lo(2), hi(2);
  lo << 0.0, 10.0;
  hi << 1.0, 20.0;
  const ParameterBox box(lo, hi);
  const QuadratureRule rule = QuadratureRule::tensor_gauss(box, {2, 3});
  REQUIRE(rule.count() == 6);

  Vector mu;
  double w = 0.0;
  double wsum = 0.0;
  std::vector<double> first_dim;
  for (std::size_t idx = 0; idx < rule.count(); ++idx) {
    rule.node(idx, mu, w);
    wsum += w;
    first_dim.push_back(mu[0]);

    Vector xi;
    double w2 = 0.0;
    rule.node_unit(idx, xi, w2);
    CHECK(w2 == w);
    CHECK(box.from_unit(xi).isApprox(mu, 1e-14));
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  // Indices 0..2 share the first node of dimension 0, indices 3..5 the
  // second: the trailing dimension increments first.
  CHECK(first_dim[0] == first_dim[1]);
  CHECK(first_dim[0] == first_dim[2]);
  CHECK(first_dim[3] == first_dim[4]);
  CHECK(first_dim[0] != first_dim[3]);

  CHECK_THROWS_AS(QuadratureRule::tensor_gauss(box, 2000, 1000), ConfigError);
}

TEST_CASE("expectation and inner product integrate polynomials exactly") {
  Vector lo(2), hi(2);
  lo << 1.0, -1.0;
  hi << 2.0, 0.0;
  const ParameterBox box(lo, hi);
  const QuadratureRule rule = QuadratureRule::tensor_gauss(box, 4);

  // E[mu0^2 mu1] over independent uniforms: (7/3) * (-1/2).
  const double val = expectation(
      [](const Vector& mu) { return mu[0] * mu[0] * mu[1]; }, rule);
  CHECK(val == doctest::Approx(-7.0 / 6.0).epsilon(1e-14));

  const double ip = inner_product(
      [](const Vector& mu) { return mu[0]; },
      [](const Vector& mu) { return mu[1]; }, rule);
  CHECK(ip == doctest::Approx(1.5 * -0.5).epsilon(1e-14));
}

TEST_CASE("multivariate basis is orthonormal under tensor quadrature") {
  Vector lo(2), hi(2);
  lo << 2.0, 5.0;
  hi << 4.0, 6.0;
  const ParameterBox box(lo, hi);
  const ChaosBasis basis = ChaosBasis::make(2, 3);
  const QuadratureRule rule = QuadratureRule::tensor_gauss(box, 5);

  const int s = basis.size();
  Matrix gram = Matrix::Zero(s, s);
  Vector mu;
  double w = 0.0;
  for (std::size_t idx = 0; idx < rule.count(); ++idx) {
    rule.node(idx, mu, w);
    const Vector phi = basis.eval(box, mu);
    gram += w * phi * phi.transpose();
  }
  CHECK((gram - Matrix::Identity(s, s)).cwiseAbs().maxCoeff() <= 1e-12);

  // eval agrees with eval_unit through the affine map.
  Vector probe(2);
  probe << 2.7, 5.9;
  CHECK(basis.eval(box, probe).isApprox(basis.eval_unit(box.to_unit(probe)),
                                        1e-14));
}

TEST_CASE("chaos coefficient statistics") {
  Vector c(4);
  c << 2.0, 0.5, -0.25, 1.0;
  const PcStatistics stats = pc_statistics(c);
  CHECK(stats.mean == 2.0);
  CHECK(stats.variance ==
        doctest::Approx(0.25 + 0.0625 + 1.0).epsilon(1e-15));
}
