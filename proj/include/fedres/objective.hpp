#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedres/loss.hpp"
#include "fedres/penalty.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// Server model plus the reliable workers' models — one point of the joint
/// penalized objective.
struct JointPoint {
  Vec server;
  std::vector<Vec> workers;
};

/// The penalized consensus objective over the reliable workers:
///   F(w) = sum_n [ f_n(w_n) + lambda * p(w_0 - w_n) ] + f_0(w_0).
/// Worker losses are evaluated on their full shards (deterministic value).
struct PenalizedObjective {
  const LossSpec* f0 = nullptr;
  std::vector<const LossSpec*> losses;                 // one per reliable worker
  std::vector<std::span<const std::size_t>> batches;   // full shards; empty for synthetic
  PenaltySpec pen;

  double value(const JointPoint& p) const {
    double f = loss_value(*f0, p.server);
    for (std::size_t n = 0; n < losses.size(); ++n) {
      std::span<const std::size_t> b = n < batches.size() ? batches[n] : std::span<const std::size_t>{};
      f += loss_value(*losses[n], p.workers[n], b);
      f += pen.lambda * penalty_eval(pen, sub(p.server, p.workers[n])).value;
    }
    return f;
  }

  JointPoint gradient(const JointPoint& p) const {
    JointPoint g;
    g.server = loss_eval(*f0, p.server).grad;
    g.workers.resize(p.workers.size());
    for (std::size_t n = 0; n < losses.size(); ++n) {
      std::span<const std::size_t> b = n < batches.size() ? batches[n] : std::span<const std::size_t>{};
      LossValue lv = loss_eval(*losses[n], p.workers[n], b);
      Vec pg = penalty_eval(pen, sub(p.server, p.workers[n])).grad;
      axpy(g.server, pen.lambda, pg);
      g.workers[n] = std::move(lv.grad);
      axpy(g.workers[n], -pen.lambda, pg);
    }
    return g;
  }
};

namespace detail {

inline double joint_norm(const JointPoint& p) {
  double s = dot(p.server, p.server);
  for (const Vec& w : p.workers) s += dot(w, w);
  return std::sqrt(s);
}

inline void joint_axpy(JointPoint& y, double a, const JointPoint& x) {
  axpy(y.server, a, x.server);
  for (std::size_t n = 0; n < y.workers.size(); ++n) axpy(y.workers[n], a, x.workers[n]);
}

inline JointPoint joint_lerp(const JointPoint& a, const JointPoint& b, double t) {
  JointPoint y;
  y.server = lerp(a.server, b.server, t);
  y.workers.resize(a.workers.size());
  for (std::size_t n = 0; n < a.workers.size(); ++n) y.workers[n] = lerp(a.workers[n], b.workers[n], t);
  return y;
}

}  // namespace detail

/// Deterministic high-precision minimizer of the penalized objective:
/// Nesterov's accelerated gradient for strongly convex smooth functions,
/// stopped at gradient norm <= tol. strong_mod and lip bound the joint
/// objective's curvature (penalty curvature <= lambda/mu enters lip).
inline JointPoint penalized_optimum(const PenalizedObjective& obj, JointPoint init,
                                    double strong_mod, double lip, double tol = 1e-12,
                                    std::size_t max_iter = 500000) {
  double kappa = std::sqrt(lip / strong_mod);
  double momentum = (kappa - 1.0) / (kappa + 1.0);
  JointPoint x = init;
  JointPoint y = init;
  for (std::size_t it = 0; it < max_iter; ++it) {
    JointPoint g = obj.gradient(y);
    if (detail::joint_norm(g) <= tol) return y;
    JointPoint x_next = y;
    detail::joint_axpy(x_next, -1.0 / lip, g);
    JointPoint y_next = detail::joint_lerp(x, x_next, 1.0 + momentum);
    x = std::move(x_next);
    y = std::move(y_next);
  }
  return y;
}

}  // namespace fedres
