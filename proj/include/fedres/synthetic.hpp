#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fedres/loss.hpp"
#include "fedres/rng.hpp"
#include "fedres/vec.hpp"

namespace fedres {

namespace detail {

/// Random orthogonal matrix (column-major Gram-Schmidt of a Gaussian draw).
inline std::vector<double> random_orthogonal(std::size_t d, Rng& rng) {
  std::vector<Vec> cols(d, Vec(d));
  for (auto& c : cols)
    for (auto& x : c) x = rng.next_normal();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) axpy(cols[i], -dot(cols[i], cols[j]), cols[j]);
    double nrm = norm(cols[i]);
    if (nrm < 1e-12) {  // degenerate draw; fall back to a unit basis vector
      cols[i].assign(d, 0.0);
      cols[i][i] = 1.0;
      for (std::size_t j = 0; j < i; ++j) axpy(cols[i], -dot(cols[i], cols[j]), cols[j]);
      nrm = norm(cols[i]);
    }
    cols[i] = scaled(cols[i], 1.0 / nrm);
  }
  std::vector<double> q(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) q[i * d + j] = cols[j][i];  // Q[i][j] = col j entry i
  return q;
}

}  // namespace detail

/// Per-worker strongly convex quadratics 1/2 (w - b_n)^T A_n (w - b_n) with
/// spectrum in [strong_mod, lip]: the extremes are pinned so Assumptions on
/// moduli hold exactly by construction.
inline std::vector<QuadraticLoss> synth_quadratic(std::size_t d, std::size_t workers,
                                                  double strong_mod, double lip,
                                                  std::uint64_t seed) {
  if (strong_mod <= 0.0 || strong_mod > lip)
    throw ConfigError("synth_quadratic: need 0 < delta <= L");
  std::vector<QuadraticLoss> out;
  out.reserve(workers);
  for (std::size_t n = 0; n < workers; ++n) {
    Rng rng = keyed_stream(seed, StreamKind::Synthetic, n);
    Vec eigs(d);
    eigs[0] = strong_mod;
    if (d > 1) eigs[d - 1] = lip;
    for (std::size_t i = 1; i + 1 < d; ++i)
      eigs[i] = strong_mod + (lip - strong_mod) * rng.next_double();
    std::vector<double> q = detail::random_orthogonal(d, rng);
    QuadraticLoss loss;
    loss.dim = d;
    loss.a.assign(d * d, 0.0);
    // A = Q diag(eigs) Q^T
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) s += q[i * d + t] * eigs[t] * q[j * d + t];
        loss.a[i * d + j] = s;
      }
    // exact symmetry
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        double s = 0.5 * (loss.a[i * d + j] + loss.a[j * d + i]);
        loss.a[i * d + j] = s;
        loss.a[j * d + i] = s;
      }
    loss.b = rng.normal_vec(d);
    out.push_back(std::move(loss));
  }
  return out;
}

}  // namespace fedres
