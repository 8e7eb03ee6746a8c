// SPDX-License-Identifier: Apache-2.0
//
// Adaptive explicit Runge-Kutta 4(5) (Dormand-Prince pair) for implicit-mass
// linear systems, with 4th-order dense output, transient result sampling,
// Hamiltonian traces, and SG output statistics.

#pragma once

#include "phsg/chaos.hpp"
#include "phsg/parametric.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/sg.hpp"
#include "phsg/types.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace phsg {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double safety = 0.9;
  /// Step-size ratio clamp per step.
  double min_ratio = 0.2;
  double max_ratio = 5.0;
  double initial_step = 0.0;  ///< 0 = automatic starting-step heuristic
  double max_step = std::numeric_limits<double>::infinity();
  /// > 0 switches to fixed-step mode (no error control).
  double fixed_step = 0.0;
  std::size_t max_steps = 200'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double last_step = 0.0;
};

using DerivativeFn = std::function<void(double, const Vector&, Vector&)>;
using InputFn = std::function<Vector(double)>;

/// Continuous extension over one accepted step; valid only inside the step
/// callback (the coefficient vectors are owned by the integrator).
class DenseSegment {
 public:
  DenseSegment(double t0, double h, const Vector& r1, const Vector& r2,
               const Vector& r3, const Vector& r4, const Vector& r5)
      : t0_(t0), h_(h), r1_(r1), r2_(r2), r3_(r3), r4_(r4), r5_(r5) {}

  [[nodiscard]] double t_begin() const { return t0_; }
  [[nodiscard]] double t_end() const { return t0_ + h_; }

  /// 4th-order interpolant at t in [t_begin, t_end].
  void eval(double t, Vector& out) const;

 private:
  double t0_, h_;
  const Vector &r1_, &r2_, &r3_, &r4_, &r5_;
};

using StepCallback = std::function<void(const DenseSegment&)>;

/// Integrate x' = f(t, x) from t0 to t1; invokes `on_step` after every
/// accepted step. Throws NumericalError on step underflow or step budget
/// exhaustion, naming the limiting time.
OdeStats integrate(const DerivativeFn& f, double t0, double t1,
                   const Vector& x0, const OdeOptions& opts,
                   const StepCallback& on_step);

/// Derivative callback for E x' = A x + B u(t) with E factorized once
/// (dense LU up to kDenseMassLimit states, sparse LU above).
inline constexpr Index kDenseMassLimit = 2000;
DerivativeFn linear_ode(const LTISystem& sys, const InputFn& u);

struct TransientResult {
  std::vector<double> times;  ///< uniform sample grid, first = t0
  Matrix states;              ///< samples x n
  Matrix outputs;             ///< samples x q
  OdeStats stats;
};

/// Simulate the LTI system with zero-order-consistent sampling: states and
/// outputs on a uniform `samples`-point grid over [t0, t1] via dense output.
TransientResult simulate(const LTISystem& sys, const InputFn& u,
                         const Vector& x0, double t0, double t1,
                         std::size_t samples, const OdeOptions& opts = {});

/// Chirp test input u(t) = sin(t^2), a harmonic oscillation of increasing
/// frequency.
double chirp(double t);

/// Per-output mean and standard deviation of an SG transient: mean = mode-1
/// block, std = sqrt(sum of squares of modes 2..s), per time sample.
struct OutputStatistics {
  Matrix mean;  ///< samples x m
  Matrix std;   ///< samples x m
};
OutputStatistics sg_output_statistics(const Matrix& outputs, int s, Index m);

/// Hamiltonian of the SG system along stored states (rows of `states`).
std::vector<double> hamiltonian_trace(const SGSystem& sg, const Matrix& states);

/// One SG transient recording only energy quantities on a uniform fine grid:
/// the Hamiltonian H(t) = 1/2 v^T E_hat v and the supplied power
/// w(t) = y_1(t)^T u(t) of the lifted (mode-1) input. O(1) memory in the
/// grid length times two doubles.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> hamiltonian;
  std::vector<double> supply;
  OdeStats stats;
};
EnergyTrace simulate_sg_energy(const SGSystem& sg, const InputFn& u, double t0,
                               double t1, std::size_t samples,
                               const OdeOptions& opts = {});

/// Quadrature-sampled expected Hamiltonian: one IVP per quadrature node of
/// the parametric system, combined in fixed node order on the given time
/// grid. Aborts with the node index on any node failure.
std::vector<double> sampled_expected_hamiltonian(
    const ParametricPHSystem& sys, const InputFn& u, const Vector& x0,
    const QuadratureRule& rule, const std::vector<double>& t_grid,
    const OdeOptions& opts = {});

}  // namespace phsg
