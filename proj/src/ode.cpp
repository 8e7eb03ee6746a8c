// SPDX-License-Identifier: Apache-2.0

#include "phsg/ode.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <sstream>
#include <vector>

namespace phsg {
namespace {

// Dormand-Prince 4(5) pair with the first-same-as-last property.
constexpr double kC2 = 1.0 / 5.0;
constexpr double kC3 = 3.0 / 10.0;
constexpr double kC4 = 4.0 / 5.0;
constexpr double kC5 = 8.0 / 9.0;

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0,
                 kA74 = 125.0 / 192.0, kA75 = -2187.0 / 6784.0,
                 kA76 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

// Weights of the 4th-order continuous extension.
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

double scaled_rms(const Vector& v, const Vector& y0, const Vector& y1,
                  double atol, double rtol) {
  const Index n = v.size();
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double sk =
        atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = v[i] / sk;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

/// Starting step-size heuristic: match the scale of the first derivative,
/// then refine with an explicit Euler probe of the second derivative.
double initial_step(const DerivativeFn& f, double t0, double t1,
                    const Vector& y0, const Vector& f0,
                    const OdeOptions& opts, std::size_t& rhs_evals) {
  const Index n = y0.size();
  double d0 = 0.0, d1 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double sk = opts.atol + opts.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sk) * (y0[i] / sk);
    d1 += (f0[i] / sk) * (f0[i] / sk);
  }
  d0 = std::sqrt(d0 / static_cast<double>(n));
  d1 = std::sqrt(d1 / static_cast<double>(n));

  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
  h0 = std::min({h0, t1 - t0, opts.max_step});

  Vector y1 = y0 + h0 * f0;
  Vector f1(n);
  f(t0 + h0, y1, f1);
  ++rhs_evals;

  double d2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double sk = opts.atol + opts.rtol * std::abs(y0[i]);
    const double r = (f1[i] - f0[i]) / sk;
    d2 += r * r;
  }
  d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;

  const double dm = std::max(d1, d2);
  const double h1 =
      (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, t1 - t0, opts.max_step});
}

[[noreturn]] void throw_at(const char* what, double t) {
  std::ostringstream msg;
  msg << what << " at t = " << t;
  throw NumericalError(msg.str());
}

}  // namespace

void DenseSegment::eval(double t, Vector& out) const {
  const double s = (t - t0_) / h_;
  const double s1 = 1.0 - s;
  out = r1_ + s * (r2_ + s1 * (r3_ + s * (r4_ + s1 * r5_)));
}

OdeStats integrate(const DerivativeFn& f, double t0, double t1,
                   const Vector& x0, const OdeOptions& opts,
                   const StepCallback& on_step) {
  if (x0.size() == 0) throw ConfigError("integrate: empty initial state");
  if (!(t1 >= t0)) throw ConfigError("integrate: t1 must be >= t0");
  if (opts.rtol <= 0.0 || opts.atol <= 0.0)
    throw ConfigError("integrate: tolerances must be positive");

  OdeStats stats;
  if (t1 == t0) return stats;

  const Index n = x0.size();
  const bool fixed = opts.fixed_step > 0.0;

  Vector y = x0;
  Vector ynew(n), ysti(n), ee(n);
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  Vector rc1(n), rc2(n), rc3(n), rc4(n), rc5(n);

  double t = t0;
  f(t, y, k1);
  ++stats.rhs_evals;

  double h = fixed          ? opts.fixed_step
             : opts.initial_step > 0.0
                 ? std::min({opts.initial_step, t1 - t0, opts.max_step})
                 : initial_step(f, t0, t1, y, k1, opts, stats.rhs_evals);

  while (t < t1) {
    if (stats.accepted + stats.rejected >= opts.max_steps)
      throw_at("step budget exhausted", t);

    h = std::min(h, opts.max_step);
    const double resolution = 16.0 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(t));
    const double remaining = t1 - t;
    if (remaining <= resolution) {
      // Accumulated rounding left a gap below time resolution; the previous
      // accepted step already reached t1 for all practical purposes.
      t = t1;
      break;
    }
    // Stretch or clamp the final step so no sub-resolution tail is left.
    const bool last = h >= remaining - resolution;
    if (last) h = remaining;
    if (h < resolution) throw_at("step size underflow", t);

    ysti = y + (h * kA21) * k1;
    f(t + kC2 * h, ysti, k2);
    ysti = y + h * (kA31 * k1 + kA32 * k2);
    f(t + kC3 * h, ysti, k3);
    ysti = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    f(t + kC4 * h, ysti, k4);
    ysti = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    f(t + kC5 * h, ysti, k5);
    ysti = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    f(t + h, ysti, k6);
    ynew = y + h * (kA71 * k1 + kA73 * k3 + kA74 * k4 + kA75 * k5 + kA76 * k6);
    f(t + h, ynew, k7);
    stats.rhs_evals += 6;

    ee = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    const double err = scaled_rms(ee, y, ynew, opts.atol, opts.rtol);

    if (!std::isfinite(err)) {
      if (fixed) throw_at("solution became non-finite", t);
      ++stats.rejected;
      h *= opts.min_ratio;
      continue;
    }

    if (fixed || err <= 1.0) {
      rc1 = y;
      rc2 = ynew - y;
      rc3 = h * k1 - rc2;
      rc4 = rc2 - h * k7 - rc3;
      rc5 = h * (kD1 * k1 + kD3 * k3 + kD4 * k4 + kD5 * k5 + kD6 * k6 +
                 kD7 * k7);
      if (on_step) on_step(DenseSegment(t, h, rc1, rc2, rc3, rc4, rc5));

      t = last ? t1 : t + h;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      stats.last_step = h;

      if (!fixed) {
        const double ratio =
            err == 0.0 ? opts.max_ratio
                       : std::clamp(opts.safety * std::pow(err, -0.2),
                                    opts.min_ratio, opts.max_ratio);
        h *= ratio;
      }
    } else {
      ++stats.rejected;
      h *= std::clamp(opts.safety * std::pow(err, -0.2), opts.min_ratio, 1.0);
    }
  }
  return stats;
}

DerivativeFn linear_ode(const LTISystem& sys, const InputFn& u) {
  struct Shared {
    Matrix A, B;
    Eigen::PartialPivLU<Matrix> dense_lu;
    Eigen::SparseLU<SparseMatrix> sparse_lu;
    bool identity_mass = false;
    bool dense = true;
    Vector rhs, input;
  };
  auto sh = std::make_shared<Shared>();
  sh->A = sys.A;
  sh->B = sys.B;
  const Index n = sys.n();
  sh->identity_mass = sys.E.isIdentity(0.0);
  if (!sh->identity_mass) {
    if (n <= kDenseMassLimit) {
      sh->dense = true;
      sh->dense_lu.compute(sys.E);
      if (std::abs(sh->dense_lu.determinant()) == 0.0)
        throw NumericalError("linear_ode: singular mass matrix");
    } else {
      sh->dense = false;
      SparseMatrix es = sys.E.sparseView();
      es.makeCompressed();
      sh->sparse_lu.compute(es);
      if (sh->sparse_lu.info() != Eigen::Success)
        throw NumericalError("linear_ode: singular mass matrix");
    }
  }
  sh->rhs.resize(n);

  return [sh, u](double t, const Vector& x, Vector& out) {
    sh->rhs.noalias() = sh->A * x;
    if (sh->B.cols() > 0) {
      sh->input = u(t);
      if (sh->input.size() != sh->B.cols())
        throw ConfigError("linear_ode: input dimension mismatch");
      sh->rhs.noalias() += sh->B * sh->input;
    }
    if (sh->identity_mass)
      out = sh->rhs;
    else if (sh->dense)
      out = sh->dense_lu.solve(sh->rhs);
    else
      out = sh->sparse_lu.solve(sh->rhs);
  };
}

namespace {

/// Emits states on an increasing grid from accepted-step dense output.
/// `emit(i, t, x)` is called exactly once per grid index, in order.
class GridSampler {
 public:
  GridSampler(const std::vector<double>* grid, Vector x0,
              std::function<void(std::size_t, double, const Vector&)> emit)
      : grid_(grid), emit_(std::move(emit)) {
    emit_(0, (*grid_)[0], x0);
    next_ = 1;
  }

  void operator()(const DenseSegment& seg) {
    Vector x;
    const double tol = 1e-9 * std::max(1.0, std::abs(seg.t_end()));
    while (next_ < grid_->size() && (*grid_)[next_] <= seg.t_end() + tol) {
      seg.eval((*grid_)[next_], x);
      emit_(next_, (*grid_)[next_], x);
      ++next_;
    }
  }

  [[nodiscard]] std::size_t emitted() const { return next_; }

 private:
  const std::vector<double>* grid_;
  std::function<void(std::size_t, double, const Vector&)> emit_;
  std::size_t next_ = 1;
};

std::vector<double> uniform_grid(double t0, double t1, std::size_t samples) {
  std::vector<double> grid(samples);
  const double dt = (t1 - t0) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i)
    grid[i] = t0 + static_cast<double>(i) * dt;
  grid.back() = t1;
  return grid;
}

}  // namespace

TransientResult simulate(const LTISystem& sys, const InputFn& u,
                         const Vector& x0, double t0, double t1,
                         std::size_t samples, const OdeOptions& opts) {
  if (samples < 2) throw ConfigError("simulate: need at least 2 samples");
  if (x0.size() != sys.n())
    throw ConfigError("simulate: initial state dimension mismatch");

  TransientResult res;
  res.times = uniform_grid(t0, t1, samples);
  res.states.resize(static_cast<Index>(samples), sys.n());
  res.outputs.resize(static_cast<Index>(samples), sys.outputs());

  auto emit = [&](std::size_t i, double t, const Vector& x) {
    res.states.row(static_cast<Index>(i)) = x.transpose();
    Vector y = sys.C * x;
    if (sys.D.cols() > 0) y += sys.D * u(t);
    res.outputs.row(static_cast<Index>(i)) = y.transpose();
  };
  GridSampler sampler(&res.times, x0, emit);

  res.stats = integrate(linear_ode(sys, u), t0, t1, x0, opts,
                        [&](const DenseSegment& seg) { sampler(seg); });
  if (sampler.emitted() != samples)
    throw NumericalError("simulate: sampling did not reach the final time");
  return res;
}

double chirp(double t) { return std::sin(t * t); }

OutputStatistics sg_output_statistics(const Matrix& outputs, int s, Index m) {
  if (outputs.cols() != static_cast<Index>(s) * m)
    throw ConfigError(
        "sg_output_statistics: column count is not modes x outputs");
  OutputStatistics st;
  const Index rows = outputs.rows();
  st.mean = outputs.leftCols(m);
  st.std.resize(rows, m);
  for (Index j = 0; j < m; ++j) {
    Vector acc = Vector::Zero(rows);
    for (int i = 1; i < s; ++i)
      acc += outputs.col(static_cast<Index>(i) * m + j).cwiseAbs2();
    st.std.col(j) = acc.cwiseSqrt();
  }
  return st;
}

std::vector<double> hamiltonian_trace(const SGSystem& sg,
                                      const Matrix& states) {
  if (states.cols() != sg.ns())
    throw ConfigError("hamiltonian_trace: state dimension mismatch");
  std::vector<double> h(static_cast<std::size_t>(states.rows()));
  Vector v, ev;
  for (Index i = 0; i < states.rows(); ++i) {
    v = states.row(i).transpose();
    ev.noalias() = sg.E * v;
    h[static_cast<std::size_t>(i)] = 0.5 * v.dot(ev);
  }
  return h;
}

EnergyTrace simulate_sg_energy(const SGSystem& sg, const InputFn& u, double t0,
                               double t1, std::size_t samples,
                               const OdeOptions& opts) {
  if (samples < 2)
    throw ConfigError("simulate_sg_energy: need at least 2 samples");
  const Index m = sg.m;
  LTISystem lti = io_restrict(sg, IOMode::SIMO);

  EnergyTrace trace;
  trace.times = uniform_grid(t0, t1, samples);
  trace.hamiltonian.resize(samples);
  trace.supply.resize(samples);

  const Vector x0 = Vector::Zero(sg.ns());
  Vector ev, y_head;
  auto emit = [&](std::size_t i, double t, const Vector& x) {
    ev.noalias() = sg.E * x;
    trace.hamiltonian[i] = 0.5 * x.dot(ev);
    const Vector uin = u(t);
    y_head.noalias() = lti.C.topRows(m) * x;
    if (lti.D.cols() > 0) y_head += lti.D.topRows(m) * uin;
    trace.supply[i] = y_head.dot(uin);
  };
  GridSampler sampler(&trace.times, x0, emit);

  trace.stats = integrate(linear_ode(lti, u), t0, t1, x0, opts,
                          [&](const DenseSegment& seg) { sampler(seg); });
  if (sampler.emitted() != samples)
    throw NumericalError(
        "simulate_sg_energy: sampling did not reach the final time");
  return trace;
}

std::vector<double> sampled_expected_hamiltonian(
    const ParametricPHSystem& sys, const InputFn& u, const Vector& x0,
    const QuadratureRule& rule, const std::vector<double>& t_grid,
    const OdeOptions& opts) {
  if (t_grid.size() < 2)
    throw ConfigError("sampled_expected_hamiltonian: need a time grid");

  std::vector<CompensatedSum> acc(t_grid.size());
  Vector mu(rule.dims());
  double w = 0.0;

  for (std::size_t node = 0; node < rule.count(); ++node) {
    rule.node(node, mu, w);
    PHSystem ph = sys.eval(mu);
    LTISystem lti = to_lti(ph);
    const Matrix energy = 0.5 * (ph.E.transpose() * ph.Q);

    auto emit = [&](std::size_t i, double, const Vector& x) {
      acc[i].add(w * x.dot(energy * x));
    };
    GridSampler sampler(&t_grid, x0, emit);
    try {
      integrate(linear_ode(lti, u), t_grid.front(), t_grid.back(), x0, opts,
                [&](const DenseSegment& seg) { sampler(seg); });
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "sampled_expected_hamiltonian: quadrature node " << node
          << " failed: " << e.what();
      throw NumericalError(msg.str());
    }
    if (sampler.emitted() != t_grid.size())
      throw NumericalError(
          "sampled_expected_hamiltonian: sampling did not reach the final "
          "time");
  }

  std::vector<double> mean(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) mean[i] = acc[i].value();
  return mean;
}

}  // namespace phsg
