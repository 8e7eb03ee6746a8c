// SPDX-License-Identifier: Apache-2.0
//
// Transient integration: convergence order against closed forms, implicit
// mass matrices, dense-output sampling, energy traces, and the quadrature
// sampling of expected energies.

#include "phsg/models.hpp"
#include "phsg/ode.hpp"
#include "phsg/sg.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <vector>

using namespace phsg;

namespace {

LTISystem oscillator() {
  LTISystem sys;
  sys.E = Matrix::Identity(2, 2);
  sys.A = Matrix(2, 2);
  sys.A << 0.0, 1.0, -1.0, 0.0;
  sys.B = Matrix::Zero(2, 1);
  sys.C = Matrix::Identity(2, 2);
  sys.D = Matrix::Zero(2, 1);
  return sys;
}

InputFn zero_input(Index m) {
  return [m](double) { return Vector::Zero(m); };
}

double max_state_error_vs_cos(const TransientResult& res) {
  double err = 0.0;
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const double t = res.times[i];
    err = std::max(err, std::abs(res.states(static_cast<Index>(i), 0) -
                                 std::cos(t)));
    err = std::max(err, std::abs(res.states(static_cast<Index>(i), 1) +
                                 std::sin(t)));
  }
  return err;
}

}  // namespace

TEST_CASE("fixed-step integration converges at fifth order") {
  const LTISystem sys = oscillator();
  Vector x0(2);
  x0 << 1.0, 0.0;

  auto run = [&](double h) {
    OdeOptions opts;
    opts.fixed_step = h;
    return max_state_error_vs_cos(
        simulate(sys, zero_input(1), x0, 0.0, 10.0, 101, opts));
  };

  const double coarse = run(0.1);
  const double fine = run(0.05);
  CHECK(fine < coarse);
  CHECK(coarse / fine >= 20.0);  // fifth order would give ~32
  CHECK(fine <= 5e-8);
}

TEST_CASE("adaptive integration hits the requested tolerance") {
  const LTISystem sys = oscillator();
  Vector x0(2);
  x0 << 1.0, 0.0;
  OdeOptions opts;
  opts.rtol = 1e-10;
  opts.atol = 1e-12;
  const TransientResult res =
      simulate(sys, zero_input(1), x0, 0.0, 20.0, 201, opts);

  REQUIRE(res.times.size() == 201);
  CHECK(res.times.front() == 0.0);
  CHECK(res.times.back() == doctest::Approx(20.0).epsilon(1e-15));
  const double dt = res.times[1] - res.times[0];
  for (std::size_t i = 1; i < res.times.size(); ++i) {
    CHECK(res.times[i] - res.times[i - 1] == doctest::Approx(dt).epsilon(1e-9));
  }
  // Dense output keeps interpolated samples at solver accuracy.
  CHECK(max_state_error_vs_cos(res) <= 1e-7);
  CHECK(res.stats.accepted > 0);
  CHECK(res.stats.rhs_evals >= 6 * res.stats.accepted);

  // Outputs are C x + D u at every sample.
  for (Index i : {Index(0), Index(100), Index(200)}) {
    CHECK((res.outputs.row(i) - res.states.row(i)).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("mass matrices factor into the derivative") {
  LTISystem scaled = oscillator();
  scaled.E = 2.0 * Matrix::Identity(2, 2);
  scaled.A << 0.0, 2.0, -2.0, 0.0;  // E x' = A x with A = 2 A0 -> x' = A0 x
  Vector x0(2);
  x0 << 1.0, 0.0;
  const TransientResult res =
      simulate(scaled, zero_input(1), x0, 0.0, 10.0, 101);
  CHECK(max_state_error_vs_cos(res) <= 1e-6);

  // Non-diagonal, non-symmetric mass: compare against the explicitly
  // inverted realization.
  LTISystem mass = oscillator();
  mass.E << 2.0, 1.0, 0.0, 1.0;
  LTISystem plain = oscillator();
  plain.A = mass.E.lu().solve(mass.A);
  const TransientResult a = simulate(mass, zero_input(1), x0, 0.0, 5.0, 51);
  const TransientResult b = simulate(plain, zero_input(1), x0, 0.0, 5.0, 51);
  CHECK((a.states - b.states).cwiseAbs().maxCoeff() <= 1e-8);

  LTISystem singular = oscillator();
  singular.E.setZero();
  CHECK_THROWS_AS(
      static_cast<void>(simulate(singular, zero_input(1), x0, 0.0, 1.0, 11)),
      NumericalError);
}

TEST_CASE("forced scalar decay follows the closed form") {
  // x' = -x + sin t, x(0) = 0 has x(t) = (sin t - cos t + exp(-t)) / 2.
  LTISystem sys;
  sys.E = Matrix::Identity(1, 1);
  sys.A = -Matrix::Identity(1, 1);
  sys.B = Matrix::Identity(1, 1);
  sys.C = Matrix::Identity(1, 1);
  sys.D = Matrix::Zero(1, 1);
  auto u = [](double t) { return Vector::Constant(1, std::sin(t)); };

  const TransientResult res =
      simulate(sys, u, Vector::Zero(1), 0.0, 8.0, 81);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const double t = res.times[i];
    const double exact = 0.5 * (std::sin(t) - std::cos(t) + std::exp(-t));
    CHECK(res.states(static_cast<Index>(i), 0) ==
          doctest::Approx(exact).epsilon(5e-8));
  }
}

TEST_CASE("step budget exhaustion raises a numerical error") {
  const LTISystem sys = oscillator();
  Vector x0(2);
  x0 << 1.0, 0.0;
  OdeOptions opts;
  opts.max_steps = 5;
  CHECK_THROWS_AS(
      static_cast<void>(simulate(sys, zero_input(1), x0, 0.0, 100.0, 11, opts)),
      NumericalError);

  OdeOptions bad;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(
      static_cast<void>(simulate(sys, zero_input(1), x0, 0.0, 1.0, 11, bad)),
      ConfigError);
}

TEST_CASE("chirp input sweeps upward in frequency") {
  CHECK(chirp(0.0) == 0.0);
  CHECK(chirp(1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(chirp(2.5) == doctest::Approx(std::sin(6.25)).epsilon(1e-15));
}

TEST_CASE("output statistics split mode blocks") {
  // s = 3 modes, m = 2 outputs; columns are mode-major blocks.
  Matrix outputs(2, 6);
  outputs << 1.0, 2.0, 3.0, 4.0, 0.0, 1.0,  //
      -1.0, 0.5, 0.0, 2.0, 4.0, -2.0;
  const OutputStatistics stats = sg_output_statistics(outputs, 3, 2);
  REQUIRE(stats.mean.rows() == 2);
  REQUIRE(stats.mean.cols() == 2);
  CHECK(stats.mean(0, 0) == 1.0);
  CHECK(stats.mean(0, 1) == 2.0);
  CHECK(stats.mean(1, 0) == -1.0);
  CHECK(stats.std(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(stats.std(0, 1) ==
        doctest::Approx(std::sqrt(16.0 + 1.0)).epsilon(1e-15));
  CHECK(stats.std(1, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(stats.std(1, 1) ==
        doctest::Approx(std::sqrt(4.0 + 4.0)).epsilon(1e-15));

  CHECK_THROWS_AS(static_cast<void>(sg_output_statistics(outputs, 4, 2)),
                  ConfigError);
}

TEST_CASE("energy traces agree with full transients") {
  const ParametricStandardPH motor = basis_transform(parametrize_motor(10.0));
  const ChaosBasis basis = ChaosBasis::make(5, 1);
  const SGSystem sg = assemble_sg(motor, basis);

  const auto u = [](double t) { return Vector::Constant(1, chirp(t)); };
  const std::size_t samples = 401;
  const double t_end = 4.0;

  const EnergyTrace trace =
      simulate_sg_energy(sg, u, 0.0, t_end, samples);
  REQUIRE(trace.times.size() == samples);
  REQUIRE(trace.hamiltonian.size() == samples);
  REQUIRE(trace.supply.size() == samples);

  const LTISystem full = io_restrict(sg, IOMode::MIMO);
  const TransientResult res = simulate(
      full, lift_input(u, sg.s(), sg.m), Vector::Zero(sg.ns()), 0.0, t_end,
      samples);
  const std::vector<double> h_full = hamiltonian_trace(sg, res.states);

  double h_scale = 0.0;
  for (double h : h_full) h_scale = std::max(h_scale, std::abs(h));
  for (std::size_t i = 0; i < samples; ++i) {
    CHECK(trace.times[i] == doctest::Approx(res.times[i]).epsilon(1e-14));
    CHECK(std::abs(trace.hamiltonian[i] - h_full[i]) <= 1e-6 * h_scale);
    // Supplied power is the mode-1 output against the deterministic input.
    const double w =
        res.outputs(static_cast<Index>(i), 0) * u(res.times[i])[0];
    CHECK(std::abs(trace.supply[i] - w) <=
          1e-6 * std::max(1.0, std::abs(w)));
  }

  // Starting from rest, the energy starts at zero and becomes positive.
  CHECK(trace.hamiltonian.front() == 0.0);
  CHECK(h_scale > 0.0);
}

TEST_CASE("hamiltonian trace evaluates the quadratic form per row") {
  SGSystem sg;
  sg.basis = ChaosBasis::make(1, 1);
  sg.n = 1;
  sg.m = 1;
  Matrix e(2, 2);
  e << 2.0, 0.5, 0.5, 3.0;
  sg.E = e.sparseView();
  Matrix states(2, 2);
  states << 1.0, 0.0,  //
      1.0, 2.0;
  const std::vector<double> h = hamiltonian_trace(sg, states);
  REQUIRE(h.size() == 2);
  CHECK(h[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(0.5 * (2.0 + 2.0 * 0.5 * 2.0 + 12.0))
                    .epsilon(1e-15));
}

TEST_CASE("quadrature-sampled energies collapse on a shrunken box") {
  // With vanishing parameter variation every quadrature node is the mean
  // model, so the sampled expected energy equals the deterministic energy.
  const ParametricPHSystem par = parametrize_motor(1e-6);
  const PHSystem det = dc_motor();
  const auto u = [](double t) { return Vector::Constant(1, chirp(t)); };
  Vector x0(2);
  x0 << 1e-3, 0.5;

  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);
  const QuadratureRule rule = QuadratureRule::tensor_gauss(par.box, 2);
  const std::vector<double> expected =
      sampled_expected_hamiltonian(par, u, x0, rule, grid);
  REQUIRE(expected.size() == grid.size());

  const TransientResult res = simulate(
      to_lti(det), u, x0, 0.0, 4.0, 41);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double direct = hamiltonian(det, Vector(res.states.row(
        static_cast<Index>(i)).transpose()));
    CHECK(expected[i] == doctest::Approx(direct).epsilon(1e-6));
  }
}
