#pragma once

#include <cstddef>
#include <cstdint>

#include "fedres/errors.hpp"

namespace fedres {

/// All run hyper-parameters in one place: penalty weight lambda, Huber mu,
/// strong-convexity moduli delta (server / workers), Lipschitz constants L,
/// worker counts, frame length T, round budget, batch size, noise bounds and
/// the RNG seed.
struct HyperParams {
  double lambda = 1.6;
  double mu = 1e-3;
  double delta0 = 0.003;
  double delta_n = 0.003;
  double lip0 = 0.003;   // L_0 of the server regularizer
  double lip_n = 0.0;    // L_n; 0 means "estimate from data"
  std::size_t q = 20;    // total workers
  std::size_t n_reliable = 16;
  std::size_t frame_len = 10;  // T (LFRPG)
  std::size_t rounds = 1000;   // K (FRPG) or I (LFRPG frames)
  std::size_t batch = 15;
  bool full_batch = false;
  double grad_power = 1.0;  // G: penalty gradient power bound
  double sigma_n = 0.0;     // per-worker gradient noise bound (bound calculators)
  std::uint64_t seed = 1;

  std::size_t faulty() const { return q - n_reliable; }

  void validate() const {
    if (n_reliable > q) throw ConfigError("constraint violated: N <= Q (reliable workers cannot exceed total)");
    if (q == 0) throw ConfigError("constraint violated: Q >= 1");
    if (lambda <= 0.0) throw ConfigError("constraint violated: lambda > 0");
    if (mu <= 0.0) throw ConfigError("constraint violated: mu > 0");
    if (delta0 <= 0.0 || delta_n <= 0.0) throw ConfigError("constraint violated: delta > 0");
    if (lip0 <= 0.0) throw ConfigError("constraint violated: L0 > 0");
    if (frame_len < 1) throw ConfigError("constraint violated: T >= 1");
    if (rounds < 1) throw ConfigError("constraint violated: rounds >= 1");
    if (batch < 1 && !full_batch) throw ConfigError("constraint violated: batch >= 1");
  }
};

}  // namespace fedres
