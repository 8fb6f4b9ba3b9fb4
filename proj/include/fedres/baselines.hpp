#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fedres/loss.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// Comparison aggregation rules.
struct AggregationRule {
  enum class Kind { RSA, Krum, GeoMed, MeanSGD };
  Kind kind = Kind::MeanSGD;
  double step_scale = 3.0;              // eta_k = step_scale / sqrt(k)
  std::size_t krum_assumed_faulty = 0;  // b; must satisfy Q - b - 2 >= 1
  double geomed_tol = 1e-8;
  std::size_t geomed_max_iter = 1000;
};

inline double benchmark_step(double scale, std::size_t k) { return scale / std::sqrt(double(k)); }

/// Element-wise sign with sign(0) = 0.
inline Vec elementwise_sign(const Vec& x) {
  Vec s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
  return s;
}

/// One synchronized RSA round over the server and honest workers:
///   w0 <- w0 - eta (grad f0(w0) + lambda sum_n sign(w0 - w_n))
///   wn <- wn - eta (grad f(wn; x)  + lambda sign(wn - w0))
/// Both sides read the pre-update models (simultaneous update).
inline void rsa_round(Vec& server_w, std::vector<Vec>& worker_ws, std::size_t k, double lambda,
                      double step_scale, const LossSpec& f0, const std::vector<LossSpec>& losses,
                      const std::vector<std::vector<std::size_t>>& batches) {
  if (k < 1) throw ConfigError("rsa_round: k must be >= 1");
  double eta = benchmark_step(step_scale, k);
  Vec server_dir = loss_eval(f0, server_w).grad;
  std::vector<Vec> new_ws = worker_ws;
  for (std::size_t n = 0; n < worker_ws.size(); ++n) {
    axpy(server_dir, lambda, elementwise_sign(sub(server_w, worker_ws[n])));
    Vec g = loss_eval(losses[n], worker_ws[n], batches[n]).grad;
    axpy(g, lambda, elementwise_sign(sub(worker_ws[n], server_w)));
    axpy(new_ws[n], -eta, g);
  }
  axpy(server_w, -eta, server_dir);
  worker_ws = std::move(new_ws);
}

/// Krum selection: each candidate is scored by the sum of squared distances
/// to its Q - b - 2 nearest other candidates; the smallest score wins, ties
/// broken toward the lowest index. Returns the selected index.
inline std::size_t krum_select(const std::vector<Vec>& candidates, std::size_t assumed_faulty) {
  std::size_t q = candidates.size();
  if (q < assumed_faulty + 3)
    throw ConfigError("krum_select: need Q - b - 2 >= 1 (Q=" + std::to_string(q) +
                      ", b=" + std::to_string(assumed_faulty) + ")");
  std::size_t neighbors = q - assumed_faulty - 2;
  std::size_t best = 0;
  double best_score = 0.0;
  std::vector<double> d2(q);
  for (std::size_t i = 0; i < q; ++i) {
    d2.clear();
    for (std::size_t j = 0; j < q; ++j) {
      if (j == i) continue;
      Vec diff = sub(candidates[i], candidates[j]);
      d2.push_back(dot(diff, diff));
    }
    std::sort(d2.begin(), d2.end());
    double score = 0.0;
    for (std::size_t t = 0; t < neighbors; ++t) score += d2[t];
    if (i == 0 || score < best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

/// Approximate geometric median by regularized Weiszfeld iteration; the
/// objective sum_i ||x_i - y|| is non-increasing across iterations.
inline Vec geomed_weiszfeld(const std::vector<Vec>& points, double tol = 1e-8,
                            std::size_t max_iter = 1000) {
  if (points.empty()) throw ConfigError("geomed_weiszfeld: need at least one point");
  constexpr double kEps = 1e-12;
  std::size_t d = points[0].size();
  Vec y(d, 0.0);
  for (const Vec& x : points) axpy(y, 1.0 / double(points.size()), x);
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vec num(d, 0.0);
    double den = 0.0;
    for (const Vec& x : points) {
      double w = 1.0 / std::max(norm(sub(x, y)), kEps);
      axpy(num, w, x);
      den += w;
    }
    Vec y_next = scaled(num, 1.0 / den);
    double step = norm(sub(y_next, y));
    y = std::move(y_next);
    if (step < tol) break;
  }
  return y;
}

}  // namespace fedres
