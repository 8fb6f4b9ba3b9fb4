#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedres/frpg.hpp"

namespace fedres {

/// LFRPG worker state across a frame of T local slots. The momentum mix
/// pairs the same-slot model of the previous frame with the previous slot's
/// v of the current frame; v carries over between frames (v_{n,0}^i =
/// v_{n,T}^{i-1}). For frame 1 the history holds T copies of the initial
/// model.
struct LfrpgWorkerState {
  std::vector<Vec> prev_w;  // w_{n,k}^{i-1}, k = 1..T
  std::vector<Vec> next_w;  // filled during the current frame
  Vec v;
  Vec upload_sum;  // running sum of g_{n,k}^i within the frame

  LfrpgWorkerState() = default;
  LfrpgWorkerState(std::size_t d, std::size_t frame_len)
      : prev_w(frame_len, Vec(d, 0.0)),
        next_w(frame_len, Vec(d, 0.0)),
        v(d, 0.0),
        upload_sum(d, 0.0) {}
};

/// Begin frame i at the server — identical recursion to the FRPG slot start,
/// indexed by frames. Returns the model broadcast for the whole frame.
inline const Vec& lfrpg_server_frame_begin(ServerState& s, std::size_t i,
                                           const HyperParams& h, const LossSpec& f0) {
  return frpg_server_begin(s, i, h, f0);
}

/// One local worker slot k (1-based, k <= T) of frame i. Accumulates the
/// penalty-gradient upload; at k == T returns the frame average
/// (1/T) sum_k g_{n,k}^i (norm <= lambda * sqrt(G)), otherwise returns empty.
inline Vec lfrpg_worker_slot(LfrpgWorkerState& s, const Vec& w0i, std::size_t i,
                             std::size_t k, const HyperParams& h, const LossSpec& loss,
                             const PenaltySpec& pen, std::span<const std::size_t> batch) {
  if (k < 1 || k > h.frame_len) throw ProtocolError("lfrpg_worker_slot: slot out of range");
  if (s.prev_w.size() != h.frame_len)
    throw ProtocolError("lfrpg_worker_slot: missing previous-frame history");
  double beta = step_beta(i);
  double alpha = step_alpha(1, i, h);

  Vec u = lerp(s.prev_w[k - 1], s.v, beta);
  Vec grad = loss_eval(loss, u, batch).grad;

  Vec prox_arg = sub(w0i, u);
  axpy(prox_arg, 1.0 / alpha, grad);
  Vec shift = penalty_prox(pen, pen.lambda / alpha, prox_arg);
  Vec w = sub(w0i, shift);
  Vec g = scaled(penalty_eval(pen, shift).grad, pen.lambda);

  double denom = h.delta_n + alpha * beta;
  for (std::size_t j = 0; j < s.v.size(); ++j)
    s.v[j] -= (h.delta_n * (s.v[j] - u[j]) + grad[j] - g[j]) / denom;

  require_finite(w, "worker model");
  require_finite(s.v, "worker auxiliary state");
  s.next_w[k - 1] = std::move(w);
  axpy(s.upload_sum, 1.0, g);

  if (k == h.frame_len) {
    Vec avg = scaled(s.upload_sum, 1.0 / double(h.frame_len));
    std::swap(s.prev_w, s.next_w);
    s.upload_sum.assign(s.upload_sum.size(), 0.0);
    return avg;
  }
  return {};
}

/// Finish frame i at the server with the Q frame-averaged uploads.
inline void lfrpg_server_frame_end(ServerState& s, std::size_t i, const HyperParams& h,
                                   const std::vector<Vec>& averaged_uploads) {
  frpg_server_end(s, i, h, averaged_uploads);
}

}  // namespace fedres
