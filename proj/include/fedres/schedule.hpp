#pragma once

#include <cstddef>

#include "fedres/errors.hpp"
#include "fedres/params.hpp"

namespace fedres {

/// Momentum mixing step, beta_k = 2 / (k + 2), k >= 1. The same schedule
/// drives FRPG slots and LFRPG frames.
inline double step_beta(std::size_t k) {
  if (k < 1) throw ConfigError("step_beta: index must be >= 1");
  return 2.0 / double(k + 2);
}

/// Prox/gradient step weight for participant n at index k:
///   server (n = 0):  delta0/14 * (k+2)^2 + (3/2) L0
///   worker (n >= 1): 3*delta_n/14 * (k+2)^2 + L_n
/// Grows quadratically, which is what lets the accelerated recursion absorb
/// bounded adversarial gradients.
inline double step_alpha(std::size_t n, std::size_t k, const HyperParams& h) {
  if (k < 1) throw ConfigError("step_alpha: index must be >= 1");
  double t = double(k + 2) * double(k + 2);
  if (n == 0) return h.delta0 / 14.0 * t + 1.5 * h.lip0;
  return 3.0 * h.delta_n / 14.0 * t + h.lip_n;
}

}  // namespace fedres
