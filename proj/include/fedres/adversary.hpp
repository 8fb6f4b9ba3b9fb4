#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fedres/data.hpp"
#include "fedres/penalty.hpp"
#include "fedres/rng.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// Which adversary corrupts which workers. The faulty set defaults to the
/// last B = Q - N worker indices.
struct AttackSpec {
  enum class Kind { None, LabelFlip, Gaussian };
  Kind kind = Kind::None;
  double scale = 1e4;  // c for the Gaussian attack
  std::vector<std::size_t> faulty;  // 0-based worker indices

  bool is_faulty(std::size_t worker) const {
    for (std::size_t f : faulty) if (f == worker) return true;
    return false;
  }

  static std::vector<std::size_t> last_b_of(std::size_t q, std::size_t b) {
    std::vector<std::size_t> out;
    for (std::size_t i = q - b; i < q; ++i) out.push_back(i);
    return out;
  }
};

/// Label-flipping corruption: every label y becomes (C-1) - y, features
/// untouched. Applying it twice restores the dataset.
inline Dataset corrupt_labels(const Dataset& ds) {
  Dataset out = ds;
  for (int& y : out.labels) {
    if (y < 0 || y >= ds.classes)
      throw DataError("corrupt_labels: label " + std::to_string(y) + " out of range 0.." +
                      std::to_string(ds.classes - 1));
    y = (ds.classes - 1) - y;
  }
  return out;
}

/// Fabricated Gaussian model: d independent draws of c * N(0, 1).
inline Vec gaussian_model(std::size_t d, double c, Rng& rng) {
  if (c < 0.0) throw ConfigError("gaussian_model: scale must be non-negative");
  return rng.normal_vec(d, c);
}

/// The message a faulty worker actually sends under the penalty-gradient
/// protocols: it must play within the format, so the upload is the bounded
/// penalty gradient evaluated against its fabricated model.
inline Vec faulty_penalty_upload(const PenaltySpec& pen, const Vec& w0_current,
                                 const Vec& fabricated_w) {
  return scaled(penalty_eval(pen, sub(w0_current, fabricated_w)).grad, pen.lambda);
}

}  // namespace fedres
