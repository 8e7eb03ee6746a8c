// SPDX-License-Identifier: Apache-2.0
//
// Core port-Hamiltonian layer: benchmark constructors, validation,
// Hamiltonians, the two structure-restoring transformations, and the
// passivity residual stencils.

#include "phsg/analysis.hpp"
#include "phsg/models.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/types.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace phsg;

namespace {

Matrix random_spd(Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = dist(gen);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("DC motor benchmark: energy and realization") {
  const PHSystem motor = dc_motor();
  CHECK(motor.n == 2);
  CHECK(motor.m == 1);
  CHECK(validate_ph(motor).passed());

  // H(x) = 1/2 (x1^2 / L + x2^2 / J) with L = 1e-3, J = 1.
  Vector x(2);
  x << 0.001, 1.0;
  CHECK(hamiltonian(motor, x) == doctest::Approx(0.5005).epsilon(1e-15));

  const LTISystem lti = to_lti(motor);
  Matrix a_expect(2, 2);
  a_expect << -10.0, -10.0, 10000.0, -1.0;
  CHECK((lti.A - a_expect).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(lti.B(0, 0) == 1.0);
  CHECK(lti.B(1, 0) == 0.0);
  CHECK(lti.C(0, 0) == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(lti.C(0, 1) == 0.0);
  CHECK(lti.D(0, 0) == 0.0);
  CHECK(stability(lti));
}

TEST_CASE("RLC ladder benchmark: structure and validation") {
  const PHSystem ladder = rlc_ladder(LadderParams::uniform(5));
  CHECK(ladder.n == 10);
  CHECK(ladder.m == 1);
  CHECK(validate_ph(ladder).passed());
  // Nearest-neighbour interconnection only.
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) {
      if (i + 1 == j) {
        CHECK(ladder.J(i, j) == -1.0);
      } else if (j + 1 == i) {
        CHECK(ladder.J(i, j) == 1.0);
      } else {
        CHECK(ladder.J(i, j) == 0.0);
      }
    }
  }
  CHECK(stability(to_lti(ladder)));
  CHECK_THROWS_AS(rlc_ladder(LadderParams::uniform(0)), ConfigError);
}

TEST_CASE("symmetric decomposition factors SPD matrices") {
  const Matrix q = random_spd(6, 11);

  const Matrix t_sqrt = symmetric_decomposition(q, Factorization::Sqrt);
  CHECK((t_sqrt - t_sqrt.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((t_sqrt * t_sqrt.transpose() - q).cwiseAbs().maxCoeff() <=
        1e-12 * q.cwiseAbs().maxCoeff());

  const Matrix t_chol = symmetric_decomposition(q, Factorization::Cholesky);
  for (Index i = 0; i < 6; ++i)
    for (Index j = i + 1; j < 6; ++j) CHECK(t_chol(i, j) == 0.0);
  CHECK((t_chol * t_chol.transpose() - q).cwiseAbs().maxCoeff() <=
        1e-12 * q.cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(symmetric_decomposition(-Matrix::Identity(3, 3)),
                  NumericalError);
}

TEST_CASE("basis transformation preserves energy and transfer behaviour") {
  for (auto method : {Factorization::Sqrt, Factorization::Cholesky}) {
    const PHSystem motor = dc_motor();
    const auto [std_sys, t] = basis_transform(motor, method);
    CHECK(validate_standard(std_sys).passed());
    CHECK((t * t.transpose() - motor.Q).cwiseAbs().maxCoeff() <=
          1e-12 * motor.Q.cwiseAbs().maxCoeff());
    // Diagonal Q with identity E: the transformed mass matrix is again the
    // identity up to rounding.
    CHECK((std_sys.E - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);

    std::mt19937 gen(17);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 20; ++trial) {
      Vector x(2);
      x << dist(gen), dist(gen);
      const double h0 = hamiltonian(motor, x);
      const double h1 = hamiltonian(std_sys, Vector(t.transpose() * x));
      CHECK(rel_gap(h0, h1) <= 1e-12);
    }

    const LTISystem lti0 = to_lti(motor);
    const LTISystem lti1 = to_lti(std_sys);
    for (double w : {1.0, 31.6, 316.0, 1e4, 1e6}) {
      const ComplexMatrix h0 = transfer(lti0, std::complex<double>(0.0, w));
      const ComplexMatrix h1 = transfer(lti1, std::complex<double>(0.0, w));
      CHECK(std::abs(h0(0, 0) - h1(0, 0)) <= 1e-10 * std::abs(h0(0, 0)));
    }
  }
}

TEST_CASE("image transformation preserves energy and transfer behaviour") {
  const PHSystem motor = dc_motor();
  const StandardPHSystem img = image_transform(motor);
  CHECK(validate_standard(img).passed());

  Matrix e_expect(2, 2);
  e_expect << 1000.0, 0.0, 0.0, 1.0;
  CHECK((img.E - e_expect).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 gen(23);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(2);
    x << dist(gen), dist(gen);
    CHECK(rel_gap(hamiltonian(motor, x), hamiltonian(img, x)) <= 1e-12);
  }

  const LTISystem lti0 = to_lti(motor);
  const LTISystem lti1 = to_lti(img);
  for (double w : {1.0, 316.0, 1e5}) {
    const ComplexMatrix h0 = transfer(lti0, std::complex<double>(0.0, w));
    const ComplexMatrix h1 = transfer(lti1, std::complex<double>(0.0, w));
    CHECK(std::abs(h0(0, 0) - h1(0, 0)) <= 1e-10 * std::abs(h0(0, 0)));
  }

  PHSystem singular_q = dc_motor();
  singular_q.Q(0, 0) = 0.0;
  singular_q.Q(1, 1) = 0.0;
  CHECK_THROWS_AS(image_transform(singular_q), NumericalError);
}

TEST_CASE("validation flags broken structure") {
  PHSystem sys = dc_motor();
  sys.J(0, 1) = sys.J(1, 0);  // destroy skew-symmetry
  const ValidationReport rep = validate_ph(sys);
  CHECK(!rep.passed());
  CHECK(!rep.j_skew);
  CHECK(rep.j_skew_violation > 1.0);

  PHSystem neg = dc_motor();
  neg.R(0, 0) = -1.0;  // dissipation block loses semidefiniteness
  const ValidationReport rep2 = validate_ph(neg);
  CHECK(!rep2.passed());
  CHECK(!rep2.w_psd);
  CHECK(rep2.w_min_eigenvalue < 0.0);

  PHSystem sing = dc_motor();
  sing.E.setZero();
  CHECK(!validate_ph(sing).e_nonsingular);

  CHECK(!validate_ph(dc_motor()).summary().empty());
}

TEST_CASE("standard form round trip") {
  const auto [std_sys, t] = basis_transform(dc_motor());
  (void)t;
  const PHSystem ph = std_sys.as_ph();
  CHECK((ph.Q - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ph.E - std_sys.E).cwiseAbs().maxCoeff() == 0.0);
  Vector x(2);
  x << 0.25, -1.5;
  CHECK(rel_gap(hamiltonian(ph, x), hamiltonian(std_sys, x)) <= 1e-15);
}

TEST_CASE("passivity residual stencils converge at their stated order") {
  // H(t) = exp(sin t) and power w = H'(t) - 1, so the exact residual is 1
  // and any deviation is pure differencing error.
  auto h_fn = [](double t) { return std::exp(std::sin(t)); };
  auto w_fn = [](double t) {
    return std::cos(t) * std::exp(std::sin(t)) - 1.0;
  };

  auto max_error = [&](double dt, int order) {
    const int samples = static_cast<int>(std::lround(10.0 / dt)) + 1;
    std::vector<double> h(samples), w(samples);
    for (int i = 0; i < samples; ++i) {
      h[static_cast<std::size_t>(i)] = h_fn(i * dt);
      w[static_cast<std::size_t>(i)] = w_fn(i * dt);
    }
    const std::vector<double> res = passivity_residual(h, w, dt, order);
    REQUIRE(res.size() == h.size() - static_cast<std::size_t>(order));
    double err = 0.0;
    for (double r : res) err = std::max(err, std::abs(r - 1.0));
    return err;
  };

  for (int order : {2, 4, 6, 8}) {
    const double coarse = max_error(0.05, order);
    const double fine = max_error(0.025, order);
    const double gain = coarse / fine;
    // Halving the step should gain ~2^order; allow a generous window.
    CHECK(gain >= std::pow(2.0, order) * 0.5);
    CHECK(fine <= coarse);
  }

  std::vector<double> h(10, 1.0), w(10, 0.0);
  CHECK_THROWS_AS(passivity_residual(h, w, 0.1, 3), ConfigError);
  CHECK_THROWS_AS(passivity_residual(h, w, 0.0, 2), ConfigError);
}
