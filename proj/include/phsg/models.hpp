// SPDX-License-Identifier: Apache-2.0
//
// Benchmark model constructors: a DC motor (two energy storages coupled by a
// gyrator) and an RLC ladder network with k cells. Both come with parametric
// variants where the physical parameters vary uniformly around their means.

#pragma once

#include "phsg/parametric.hpp"
#include "phsg/ph_system.hpp"

#include <string>

namespace phsg {

struct MotorParams {
  double L = 1e-3;  ///< inductance
  double R = 1e-2;  ///< resistance
  double K = 10.0;  ///< electro-mechanical coupling constant
  double B = 1.0;   ///< friction
  double J = 1.0;   ///< rotational inertia
};

/// n = 2 (flux linkage, angular momentum), m = 1 (voltage in, current out).
PHSystem dc_motor(const MotorParams& p = {});

struct LadderParams {
  int k = 5;
  Vector C;  ///< capacitances, size k (default 1e-6 each)
  Vector L;  ///< inductances, size k (default 1e-4 each)
  Vector R;  ///< resistances, size k (default 1 each)

  static LadderParams uniform(int k, double c = 1e-6, double l = 1e-4,
                              double r = 1.0);
};

/// n = 2k states (voltage-like and current-like per cell), m = 1.
PHSystem rlc_ladder(const LadderParams& p);

/// Motor with the five physical parameters (L, R, K, B, J) as independent
/// uniform random variables within +-variation_pct of their means. The energy
/// matrix Q contains reciprocals 1/L, 1/J, so it is not polynomial in these
/// parameters; quadrature-based assembly applies.
ParametricPHSystem parametrize_motor(double variation_pct,
                                     const MotorParams& mean = {});

/// Ladder with the rearranged parameters mu_i = 1/C_i, mu_{k+i} = 1/L_i,
/// mu_{2k+i} = R_i as independent uniform random variables (q = 3k). All
/// system matrices are polynomial in mu, so exact assembly applies.
ParametricPHSystem parametrize_ladder(int k, double variation_pct,
                                      const LadderParams& mean_phys = {});

enum class ModelKind { Motor, Ladder };

struct ModelPreset {
  ModelKind kind = ModelKind::Motor;
  int k = 5;  ///< ladder cells (ignored for the motor)

  [[nodiscard]] std::string name() const;
};

/// Parse "motor" or "ladder:k=<cells>" (plain "ladder" uses k = 5).
ModelPreset parse_preset(const std::string& text);

/// Build the parametric benchmark for a preset.
ParametricPHSystem make_model(const ModelPreset& preset, double variation_pct);

}  // namespace phsg
