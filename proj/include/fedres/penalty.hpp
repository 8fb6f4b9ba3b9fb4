#pragma once

#include <cmath>

#include "fedres/errors.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// Huber consensus penalty: quadratic within radius mu, linear with unit
/// gradient beyond. The bounded gradient (norm <= sqrt(G) = 1) is what caps
/// the influence of any single worker upload.
struct PenaltySpec {
  double mu = 1e-3;     // smoothing constant, > 0
  double lambda = 1.6;  // penalty weight, > 0
  double grad_power = 1.0;  // G: max squared gradient norm (1 for Huber)
};

struct PenaltyValue {
  double value = 0.0;
  Vec grad;
};

/// Value and gradient of the Huber penalty at z.
inline PenaltyValue penalty_eval(const PenaltySpec& spec, const Vec& z) {
  if (spec.mu <= 0.0) throw ConfigError("penalty: mu must be positive");
  require_finite(z, "penalty_eval input");
  double r = norm(z);
  PenaltyValue out;
  if (r <= spec.mu) {
    out.value = (r * r) / (2.0 * spec.mu);
    out.grad = scaled(z, 1.0 / spec.mu);
  } else {
    out.value = r - spec.mu / 2.0;
    out.grad = scaled(z, 1.0 / r);
  }
  return out;
}

/// Closed-form proximal operator of the scaled Huber penalty:
///   argmin_x { c*p(x) + 1/2 ||x - v||^2 },  c > 0.
/// Quadratic branch shrinks by mu/(mu+c); beyond mu+c the minimizer is the
/// norm shrinkage (1 - c/||v||) v. Both meet at ||v|| = mu + c.
inline Vec penalty_prox(const PenaltySpec& spec, double c, const Vec& v) {
  if (c <= 0.0) throw ConfigError("penalty_prox: scale c must be positive");
  if (spec.mu <= 0.0) throw ConfigError("penalty_prox: mu must be positive");
  require_finite(v, "penalty_prox input");
  double r = norm(v);
  if (r <= spec.mu + c) return scaled(v, spec.mu / (spec.mu + c));
  return scaled(v, 1.0 - c / r);
}

}  // namespace fedres
