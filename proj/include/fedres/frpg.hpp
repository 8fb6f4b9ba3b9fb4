#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fedres/loss.hpp"
#include "fedres/params.hpp"
#include "fedres/penalty.hpp"
#include "fedres/schedule.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// Three-sequence accelerated state (u, w, v) of one participant.
struct ServerState {
  Vec u, w, v;
  Vec grad_u;  // nabla f0(u_k), cached between begin and end of the slot

  explicit ServerState(std::size_t d = 0) : u(d, 0.0), w(d, 0.0), v(d, 0.0) {}
};

struct WorkerState {
  Vec u, w, v;

  explicit WorkerState(std::size_t d = 0) : u(d, 0.0), w(d, 0.0), v(d, 0.0) {}
};

/// Start slot k at the server: momentum mix u from (w, v), gradient step to
/// the broadcast model w. Returns the model to broadcast.
inline const Vec& frpg_server_begin(ServerState& s, std::size_t k, const HyperParams& h,
                                    const LossSpec& f0) {
  double beta = step_beta(k);
  double alpha0 = step_alpha(0, k, h);
  s.u = lerp(s.w, s.v, beta);
  s.grad_u = loss_eval(f0, s.u).grad;
  s.w = s.u;
  axpy(s.w, -1.0 / alpha0, s.grad_u);
  require_finite(s.w, "server model after gradient step");
  return s.w;
}

/// One honest worker slot: momentum mix, stochastic gradient at u, proximal
/// model update against the broadcast model, penalty-gradient upload from the
/// new model, then the v recursion. The returned upload always satisfies
/// ||g|| <= lambda * sqrt(G), whatever the broadcast was.
inline Vec frpg_worker_step(WorkerState& s, const Vec& w0k, std::size_t k,
                            const HyperParams& h, const LossSpec& loss,
                            const PenaltySpec& pen, std::span<const std::size_t> batch) {
  double beta = step_beta(k);
  double alpha = step_alpha(1, k, h);
  s.u = lerp(s.w, s.v, beta);
  Vec grad = loss_eval(loss, s.u, batch).grad;

  Vec prox_arg = sub(w0k, s.u);
  axpy(prox_arg, 1.0 / alpha, grad);
  Vec shift = penalty_prox(pen, pen.lambda / alpha, prox_arg);
  s.w = sub(w0k, shift);  // w0k - w == shift

  Vec g = scaled(penalty_eval(pen, shift).grad, pen.lambda);

  double denom = h.delta_n + alpha * beta;
  for (std::size_t i = 0; i < s.v.size(); ++i)
    s.v[i] -= (h.delta_n * (s.v[i] - s.u[i]) + grad[i] - g[i]) / denom;

  require_finite(s.w, "worker model");
  require_finite(s.v, "worker auxiliary state");
  return g;
}

/// Finish slot k at the server: fold the Q uploads in ascending worker order
/// and advance v. The aggregate norm cap ||sum g|| <= Q * lambda * sqrt(G) is
/// a checked invariant — it holds for arbitrary (even adversarial) uploads
/// produced through the penalty-gradient message format.
inline void frpg_server_end(ServerState& s, std::size_t k, const HyperParams& h,
                            const std::vector<Vec>& uploads) {
  if (uploads.size() != h.q)
    throw ProtocolError("server expected " + std::to_string(h.q) + " uploads, got " +
                        std::to_string(uploads.size()));
  Vec sum_g(s.v.size(), 0.0);
  for (const Vec& g : uploads) {
    if (g.size() != sum_g.size()) throw ProtocolError("upload dimension mismatch");
    axpy(sum_g, 1.0, g);
  }
  double cap = double(h.q) * h.lambda * std::sqrt(h.grad_power);
  if (!(norm(sum_g) <= cap * (1.0 + 1e-12) + 1e-12))
    throw ProtocolError("aggregate upload norm exceeds Q*lambda*sqrt(G)");

  double beta = step_beta(k);
  double alpha0 = step_alpha(0, k, h);
  double denom = h.delta0 + alpha0 * beta;
  for (std::size_t i = 0; i < s.v.size(); ++i)
    s.v[i] -= (h.delta0 * (s.v[i] - s.u[i]) + s.grad_u[i] + sum_g[i]) / denom;
  require_finite(s.v, "server auxiliary state");
}

}  // namespace fedres
