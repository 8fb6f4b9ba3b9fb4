#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "fedres/bounds.hpp"
#include "fedres/objective.hpp"
#include "fedres/runner.hpp"

namespace fedres {

/// The penalized optimum u* of a problem plus the bound-calculator inputs
/// derived from it (zero initialization assumed, matching the runners).
struct TheoremSetup {
  JointPoint optimum;
  double optimum_value = 0.0;
  double init_value = 0.0;
  BoundInputs inputs;
};

/// Build the reliable-worker objective for a problem.
inline PenalizedObjective reliable_objective(const Problem& pb) {
  PenalizedObjective obj;
  obj.f0 = &pb.f0;
  obj.pen = pb.penalty();
  for (std::size_t n : pb.reliable_workers()) {
    obj.losses.push_back(&pb.worker_losses[n]);
    obj.batches.push_back(pb.shards.empty() ? std::span<const std::size_t>{}
                                            : std::span<const std::size_t>(pb.shards[n]));
  }
  return obj;
}

/// Solve for u* to high precision and evaluate every input the Theorem 1/2
/// right-hand sides need. Requires a deterministic problem (full-shard
/// batches or synthetic losses).
inline TheoremSetup theorem_setup(const Problem& pb, double tol = 1e-12) {
  const HyperParams& h = pb.hyper;
  PenalizedObjective obj = reliable_objective(pb);
  std::size_t n_rel = obj.losses.size();

  JointPoint zero;
  zero.server = Vec(pb.dim, 0.0);
  zero.workers.assign(n_rel, Vec(pb.dim, 0.0));

  double strong = std::min(h.delta0, h.delta_n);
  double pen_curv = h.lambda / h.mu;
  double lip = std::max(h.lip0 + 2.0 * double(n_rel) * pen_curv, h.lip_n + 2.0 * pen_curv);

  TheoremSetup setup;
  setup.optimum = penalized_optimum(obj, zero, strong, lip, tol);
  setup.optimum_value = obj.value(setup.optimum);
  setup.init_value = obj.value(zero);
  setup.inputs.f0_gap = setup.init_value - setup.optimum_value;
  setup.inputs.dist0_sq = dot(setup.optimum.server, setup.optimum.server);
  setup.inputs.distn_sq.resize(n_rel);
  for (std::size_t n = 0; n < n_rel; ++n)
    setup.inputs.distn_sq[n] = dot(setup.optimum.workers[n], setup.optimum.workers[n]);
  // Zero initialization keeps the frame-0 slot models constant, so the
  // frame-0 average gap equals the plain initial gap.
  setup.inputs.favg0_gap = setup.inputs.f0_gap;
  return setup;
}

}  // namespace fedres
