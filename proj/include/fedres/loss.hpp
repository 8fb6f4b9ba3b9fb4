#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "fedres/data.hpp"
#include "fedres/errors.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// 1/2 (w - b)^T A (w - b) with A positive definite (row-major d x d).
struct QuadraticLoss {
  std::size_t dim = 0;
  std::vector<double> a;  // dim x dim
  Vec b;
};

/// (delta/2) ||w||^2 — the server regularizer.
struct SquareNormLoss {
  double delta = 0.0;
};

/// Mini-batch multinomial logistic regression over a dataset view, with an
/// L2 regularizer (reg/2)||w||^2 that provides the strong-convexity modulus.
/// Weights are flattened class-major: w[c * features + j].
struct LogisticLoss {
  std::size_t features = 0;
  int classes = 0;
  double reg = 0.0;
  const Dataset* data = nullptr;
};

using LossSpec = std::variant<QuadraticLoss, SquareNormLoss, LogisticLoss>;

struct LossValue {
  double value = 0.0;
  Vec grad;
};

inline std::size_t model_dim(const LossSpec& spec) {
  if (const auto* q = std::get_if<QuadraticLoss>(&spec)) return q->dim;
  if (const auto* l = std::get_if<LogisticLoss>(&spec)) return l->features * std::size_t(l->classes);
  return 0;  // SquareNormLoss: any dimension
}

namespace detail {

inline void class_scores(const LogisticLoss& spec, const Vec& w, const double* x,
                         std::vector<double>& scores) {
  scores.assign(std::size_t(spec.classes), 0.0);
  for (int c = 0; c < spec.classes; ++c) {
    const double* wc = w.data() + std::size_t(c) * spec.features;
    double s = 0.0;
    for (std::size_t j = 0; j < spec.features; ++j) s += wc[j] * x[j];
    scores[std::size_t(c)] = s;
  }
}

/// Stabilized softmax in place; returns log-sum-exp of the original scores.
inline double softmax_inplace(std::vector<double>& scores) {
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return mx + std::log(sum);
}

inline LossValue eval_quadratic(const QuadraticLoss& q, const Vec& w, bool want_grad) {
  Vec r = sub(w, q.b);
  Vec ar(q.dim, 0.0);
  for (std::size_t i = 0; i < q.dim; ++i) {
    const double* row = q.a.data() + i * q.dim;
    double s = 0.0;
    for (std::size_t j = 0; j < q.dim; ++j) s += row[j] * r[j];
    ar[i] = s;
  }
  LossValue out;
  out.value = 0.5 * dot(r, ar);
  if (want_grad) out.grad = std::move(ar);
  return out;
}

inline LossValue eval_logistic(const LogisticLoss& l, const Vec& w,
                               std::span<const std::size_t> batch, bool want_grad) {
  if (batch.empty()) throw ConfigError("loss_eval: empty batch");
  if (w.size() != l.features * std::size_t(l.classes))
    throw ConfigError("loss_eval: model dimension mismatch");
  LossValue out;
  if (want_grad) out.grad.assign(w.size(), 0.0);
  std::vector<double> scores;
  double inv_b = 1.0 / double(batch.size());
  for (std::size_t idx : batch) {
    if (idx >= l.data->rows) throw DataError("loss_eval: sample index out of range");
    const double* x = l.data->row(idx);
    int y = l.data->labels[idx];
    class_scores(l, w, x, scores);
    double score_y = scores[std::size_t(y)];
    double lse = softmax_inplace(scores);
    out.value += inv_b * (lse - score_y);  // -log p_y
    if (want_grad) {
      for (int c = 0; c < l.classes; ++c) {
        double coef = inv_b * (scores[std::size_t(c)] - (c == y ? 1.0 : 0.0));
        double* gc = out.grad.data() + std::size_t(c) * l.features;
        for (std::size_t j = 0; j < l.features; ++j) gc[j] += coef * x[j];
      }
    }
  }
  if (l.reg > 0.0) {
    out.value += 0.5 * l.reg * dot(w, w);
    if (want_grad) axpy(out.grad, l.reg, w);
  }
  return out;
}

}  // namespace detail

/// Mini-batch loss value and exact gradient. For QuadraticLoss and
/// SquareNormLoss the batch is ignored (deterministic losses).
inline LossValue loss_eval(const LossSpec& spec, const Vec& w,
                           std::span<const std::size_t> batch = {}) {
  if (const auto* q = std::get_if<QuadraticLoss>(&spec)) return detail::eval_quadratic(*q, w, true);
  if (const auto* s = std::get_if<SquareNormLoss>(&spec)) {
    LossValue out;
    out.value = 0.5 * s->delta * dot(w, w);
    out.grad = scaled(w, s->delta);
    return out;
  }
  return detail::eval_logistic(std::get<LogisticLoss>(spec), w, batch, true);
}

/// Value-only evaluation (skips gradient work for metrics passes).
inline double loss_value(const LossSpec& spec, const Vec& w,
                         std::span<const std::size_t> batch = {}) {
  if (const auto* q = std::get_if<QuadraticLoss>(&spec)) return detail::eval_quadratic(*q, w, false).value;
  if (const auto* s = std::get_if<SquareNormLoss>(&spec)) return 0.5 * s->delta * dot(w, w);
  return detail::eval_logistic(std::get<LogisticLoss>(spec), w, batch, false).value;
}

/// Top-1 class prediction; ties break toward the lowest class index.
inline int softmax_predict(const LogisticLoss& spec, const Vec& w, const double* x) {
  if (w.size() != spec.features * std::size_t(spec.classes))
    throw ConfigError("softmax_predict: model dimension mismatch");
  std::vector<double> scores;
  detail::class_scores(spec, w, x, scores);
  int best = 0;
  for (int c = 1; c < spec.classes; ++c)
    if (scores[std::size_t(c)] > scores[std::size_t(best)]) best = c;
  return best;
}

/// Fraction of samples whose prediction matches the label.
inline double top1_accuracy(const LogisticLoss& spec, const Vec& w, const Dataset& ds) {
  if (ds.rows == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.rows; ++i)
    if (softmax_predict(spec, w, ds.row(i)) == ds.labels[i]) ++hits;
  return double(hits) / double(ds.rows);
}

/// Upper-bound estimate of the logistic Lipschitz constant over a shard:
/// (1/4) lambda_max(X^T X) / m + delta, with lambda_max found by power
/// iteration (deterministic start vector).
inline double estimate_lipschitz(const Dataset& ds, const std::vector<std::size_t>& shard,
                                 double delta, int iters = 200) {
  if (shard.empty()) throw ConfigError("estimate_lipschitz: empty shard");
  std::size_t p = ds.cols;
  Vec v(p, 1.0 / std::sqrt(double(p)));
  double eig = 0.0;
  Vec xv;
  for (int it = 0; it < iters; ++it) {
    xv.assign(p, 0.0);
    for (std::size_t idx : shard) {
      const double* x = ds.row(idx);
      double xi_v = 0.0;
      for (std::size_t j = 0; j < p; ++j) xi_v += x[j] * v[j];
      for (std::size_t j = 0; j < p; ++j) xv[j] += xi_v * x[j];
    }
    double nrm = norm(xv);
    if (nrm == 0.0) return delta;
    eig = nrm;
    v = scaled(xv, 1.0 / nrm);
  }
  return 0.25 * eig / double(shard.size()) + delta;
}

}  // namespace fedres
