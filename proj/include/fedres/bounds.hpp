#pragma once

#include <cstddef>
#include <vector>

#include "fedres/params.hpp"
#include "fedres/schedule.hpp"

namespace fedres {

/// sigma_0^2 = lambda^2 (Q + B)^2 G — the worst-case squared influence of the
/// aggregate uploads plus the faulty aggregate.
inline double sigma0_sq(const HyperParams& h) {
  double qb = double(h.q) + double(h.faulty());
  return h.lambda * h.lambda * qb * qb * h.grad_power;
}

/// Inputs every bound calculator needs. Distances are against the penalized
/// optimum u*: dist0_sq = ||u_0* - v_{0,0}||^2, distn_sq[n] likewise per
/// reliable worker. f0_gap = F(w_init) - F(u*); favg0_gap is the frame-0
/// average gap used by the LFRPG bound.
struct BoundInputs {
  double f0_gap = 0.0;
  double dist0_sq = 0.0;
  std::vector<double> distn_sq;
  double favg0_gap = 0.0;
};

struct BoundCurve {
  std::vector<double> rhs;  // rhs[k-1] = bound after k communication rounds
  double neighborhood = 0.0;  // lambda^2 B^2 G / delta0, constant unspecified
};

/// Right-hand side of the FRPG convergence guarantee over K rounds:
///   4/(K+2)^2 (f0_gap + sum_n eta9_n) + 4K/(K+2)^2 sum_n eta10_n
/// with eta9_0 = (3 delta0/8 + alpha_{0,1}/2) dist0_sq,
///      eta9_n = (alpha_{n,1}/2) distn_sq[n],
///      eta10_0 = (7 lambda^2 Q^2 G + 21/8 sigma0^2) / delta0,
///      eta10_n = 7 sigma_n^2 / (12 delta_n).
/// The unspecified-constant neighborhood O(lambda^2 B^2 G / delta0) is
/// reported separately and excluded from B = 0 checks.
inline BoundCurve compute_frpg_bound(const HyperParams& h, const BoundInputs& in,
                                     std::size_t max_rounds) {
  double a01 = step_alpha(0, 1, h);
  double an1 = step_alpha(1, 1, h);
  double s0sq = sigma0_sq(h);
  double lqg = h.lambda * h.lambda * double(h.q) * double(h.q) * h.grad_power;

  double eta9 = (3.0 * h.delta0 / 8.0 + 0.5 * a01) * in.dist0_sq;
  for (double dsq : in.distn_sq) eta9 += 0.5 * an1 * dsq;

  double eta10 = (7.0 * lqg + 21.0 / 8.0 * s0sq) / h.delta0;
  eta10 += double(in.distn_sq.size()) * 7.0 * h.sigma_n * h.sigma_n / (12.0 * h.delta_n);

  BoundCurve out;
  out.neighborhood = h.lambda * h.lambda * double(h.faulty()) * double(h.faulty()) *
                     h.grad_power / h.delta0;
  out.rhs.resize(max_rounds);
  for (std::size_t k = 1; k <= max_rounds; ++k) {
    double denom = double(k + 2) * double(k + 2);
    out.rhs[k - 1] = 4.0 / denom * (in.f0_gap + eta9) + 4.0 * double(k) / denom * eta10;
  }
  return out;
}

/// Right-hand side of the LFRPG guarantee on the frame-averaged iterates:
///   2 eta16 / (T (I+2)^2) + (eta17 + I eta18) / (I+2)^2
/// with eta16 = sum_n alpha_n^1 distn_sq[n],
///      eta17 = (3 delta0/2 + 2 alpha_0^1) dist0_sq + 4 favg0_gap,
///      eta18 = sum_n 7 sigma_n^2/(3 delta_n) + (11 sigma0^2 + 28 lambda^2 Q^2 G)/delta0.
inline BoundCurve compute_lfrpg_bound(const HyperParams& h, const BoundInputs& in,
                                      std::size_t max_frames) {
  double a01 = step_alpha(0, 1, h);
  double an1 = step_alpha(1, 1, h);
  double s0sq = sigma0_sq(h);
  double lqg = h.lambda * h.lambda * double(h.q) * double(h.q) * h.grad_power;

  double eta16 = 0.0;
  for (double dsq : in.distn_sq) eta16 += an1 * dsq;
  double eta17 = (1.5 * h.delta0 + 2.0 * a01) * in.dist0_sq + 4.0 * in.favg0_gap;
  double eta18 = double(in.distn_sq.size()) * 7.0 * h.sigma_n * h.sigma_n / (3.0 * h.delta_n) +
                 (11.0 * s0sq + 28.0 * lqg) / h.delta0;

  BoundCurve out;
  out.neighborhood = h.lambda * h.lambda * double(h.faulty()) * double(h.faulty()) *
                     h.grad_power / h.delta0;
  out.rhs.resize(max_frames);
  for (std::size_t i = 1; i <= max_frames; ++i) {
    double denom = double(i + 2) * double(i + 2);
    out.rhs[i - 1] =
        2.0 * eta16 / (double(h.frame_len) * denom) + (eta17 + double(i) * eta18) / denom;
  }
  return out;
}

}  // namespace fedres
