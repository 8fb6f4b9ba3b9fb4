#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fedres/adversary.hpp"
#include "fedres/baselines.hpp"
#include "fedres/data.hpp"
#include "fedres/frpg.hpp"
#include "fedres/lfrpg.hpp"
#include "fedres/loss.hpp"
#include "fedres/metrics.hpp"
#include "fedres/params.hpp"
#include "fedres/penalty.hpp"

namespace fedres {

/// Everything one experiment needs: the server regularizer, per-worker loss
/// specs (label-flipped workers point at the corrupted dataset), shard
/// assignments, clean train/test sets for accuracy, hyper-parameters and the
/// attack. Faulty-set size must equal Q - N.
struct Problem {
  std::size_t dim = 0;
  LossSpec f0;
  std::vector<LossSpec> worker_losses;
  std::vector<std::vector<std::size_t>> shards;  // empty inner vectors for synthetic losses
  const Dataset* train = nullptr;
  const Dataset* test = nullptr;
  HyperParams hyper;
  AttackSpec attack;
  bool record_server_trajectory = false;

  PenaltySpec penalty() const { return PenaltySpec{hyper.mu, hyper.lambda, hyper.grad_power}; }

  std::vector<std::size_t> reliable_workers() const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < hyper.q; ++n)
      if (!attack.is_faulty(n)) out.push_back(n);
    return out;
  }

  void validate() const {
    hyper.validate();
    if (worker_losses.size() != hyper.q)
      throw ConfigError("problem: need one loss spec per worker");
    if (!shards.empty() && shards.size() != hyper.q)
      throw ConfigError("problem: shard assignment does not cover all workers");
    if (attack.faulty.size() != hyper.faulty())
      throw ConfigError("problem: faulty set size must equal Q - N");
    for (std::size_t f : attack.faulty)
      if (f >= hyper.q) throw ConfigError("problem: faulty worker index out of range");
    if (dim == 0) throw ConfigError("problem: model dimension not set");
  }
};

struct RunResult {
  std::vector<MetricsRecord> records;
  double max_upload_norm = 0.0;
  std::vector<double> avg_iter_loss;  // LFRPG: F at the frame-averaged iterate
  Vec final_server_w;
  std::vector<Vec> final_worker_w;    // reliable entries only; others empty
  std::vector<Vec> server_trajectory; // filled when requested
};

namespace detail {

inline std::vector<std::size_t> draw_batch(const Problem& pb, std::size_t n, std::size_t round,
                                           std::size_t slot) {
  if (!std::holds_alternative<LogisticLoss>(pb.worker_losses[n])) return {};
  const auto& shard = pb.shards[n];
  if (pb.hyper.full_batch) return shard;
  Rng rng = keyed_stream(pb.hyper.seed, StreamKind::Minibatch, n, round, slot);
  return sample_minibatch(shard, pb.hyper.batch, rng);
}

/// F(w) of the penalized objective over the reliable workers, full shards.
inline double objective_over_reliable(const Problem& pb, const Vec& w0,
                                      const std::vector<const Vec*>& models) {
  PenaltySpec pen = pb.penalty();
  double f = loss_value(pb.f0, w0);
  for (std::size_t n : pb.reliable_workers()) {
    std::span<const std::size_t> shard =
        pb.shards.empty() ? std::span<const std::size_t>{} : std::span<const std::size_t>(pb.shards[n]);
    f += loss_value(pb.worker_losses[n], *models[n], shard);
    f += pen.lambda * penalty_eval(pen, sub(w0, *models[n])).value;
  }
  return f;
}

inline MetricsRecord round_metrics(const Problem& pb, std::size_t round, const Vec& w0,
                                   const std::vector<const Vec*>& models, double sum_g_norm,
                                   double delta0_norm) {
  MetricsRecord r;
  r.round = round;
  r.loss_f = objective_over_reliable(pb, w0, models);
  if (!std::isfinite(r.loss_f)) throw ProtocolError("non-finite objective value");
  r.sum_g_norm = sum_g_norm;
  r.delta0_norm = delta0_norm;
  if (pb.train && pb.train->classes > 1) {
    LogisticLoss probe{pb.train->cols, pb.train->classes, 0.0, pb.train};
    r.train_acc = top1_accuracy(probe, w0, *pb.train);
    if (pb.test) {
      probe.data = pb.test;
      r.test_acc = top1_accuracy(probe, w0, *pb.test);
    }
  }
  return r;
}

inline double faulty_aggregate_norm(const Problem& pb, const std::vector<Vec>& uploads) {
  Vec sum(pb.dim, 0.0);
  for (std::size_t n = 0; n < uploads.size(); ++n)
    if (pb.attack.is_faulty(n)) axpy(sum, 1.0, uploads[n]);
  return norm(sum);
}

inline double aggregate_norm(const std::vector<Vec>& uploads, std::size_t dim) {
  Vec sum(dim, 0.0);
  for (const Vec& g : uploads) axpy(sum, 1.0, g);
  return norm(sum);
}

}  // namespace detail

/// Run the accelerated penalty-gradient protocol for K communication rounds.
/// Faulty Gaussian workers fabricate a fresh model per slot but must speak
/// the penalty-gradient format; label-flipped workers run the honest pipeline
/// on their corrupted shards.
inline RunResult run_frpg(const Problem& pb) {
  pb.validate();
  const HyperParams& h = pb.hyper;
  PenaltySpec pen = pb.penalty();
  ServerState server(pb.dim);
  std::vector<WorkerState> workers(h.q, WorkerState(pb.dim));
  RunResult res;
  res.records.reserve(h.rounds);
  for (std::size_t k = 1; k <= h.rounds; ++k) {
    const Vec& w0k = frpg_server_begin(server, k, h, pb.f0);
    std::vector<Vec> uploads(h.q);
    for (std::size_t n = 0; n < h.q; ++n) {
      bool gaussian = pb.attack.is_faulty(n) && pb.attack.kind == AttackSpec::Kind::Gaussian;
      if (gaussian) {
        Rng rng = keyed_stream(h.seed, StreamKind::Attack, n, k, 1);
        Vec fab = gaussian_model(pb.dim, pb.attack.scale, rng);
        uploads[n] = faulty_penalty_upload(pen, w0k, fab);
      } else {
        std::vector<std::size_t> batch = detail::draw_batch(pb, n, k, 1);
        uploads[n] = frpg_worker_step(workers[n], w0k, k, h, pb.worker_losses[n], pen, batch);
      }
      res.max_upload_norm = std::max(res.max_upload_norm, norm(uploads[n]));
    }
    double sum_norm = detail::aggregate_norm(uploads, pb.dim);
    double delta0 = detail::faulty_aggregate_norm(pb, uploads);
    frpg_server_end(server, k, h, uploads);

    std::vector<const Vec*> models(h.q, nullptr);
    for (std::size_t n = 0; n < h.q; ++n) models[n] = &workers[n].w;
    res.records.push_back(detail::round_metrics(pb, k, server.w, models, sum_norm, delta0));
    if (pb.record_server_trajectory) res.server_trajectory.push_back(server.w);
  }
  res.final_server_w = server.w;
  res.final_worker_w.resize(h.q);
  for (std::size_t n : pb.reliable_workers()) res.final_worker_w[n] = workers[n].w;
  return res;
}

/// Run the local variant: I frames of T local slots with one communication
/// round per frame. Records per-frame metrics at the last-slot models plus
/// the objective at the frame-averaged iterate.
inline RunResult run_lfrpg(const Problem& pb) {
  pb.validate();
  const HyperParams& h = pb.hyper;
  PenaltySpec pen = pb.penalty();
  std::size_t t = h.frame_len;
  ServerState server(pb.dim);
  std::vector<LfrpgWorkerState> workers(h.q, LfrpgWorkerState(pb.dim, t));
  RunResult res;
  res.records.reserve(h.rounds);
  res.avg_iter_loss.reserve(h.rounds);
  for (std::size_t i = 1; i <= h.rounds; ++i) {
    const Vec& w0i = lfrpg_server_frame_begin(server, i, h, pb.f0);
    std::vector<Vec> uploads(h.q);
    for (std::size_t n = 0; n < h.q; ++n) {
      bool gaussian = pb.attack.is_faulty(n) && pb.attack.kind == AttackSpec::Kind::Gaussian;
      if (gaussian) {
        Vec sum(pb.dim, 0.0);
        for (std::size_t k = 1; k <= t; ++k) {
          Rng rng = keyed_stream(h.seed, StreamKind::Attack, n, i, k);
          Vec fab = gaussian_model(pb.dim, pb.attack.scale, rng);
          axpy(sum, 1.0, faulty_penalty_upload(pen, w0i, fab));
        }
        uploads[n] = scaled(sum, 1.0 / double(t));
      } else {
        for (std::size_t k = 1; k <= t; ++k) {
          std::vector<std::size_t> batch = detail::draw_batch(pb, n, i, k);
          Vec avg = lfrpg_worker_slot(workers[n], w0i, i, k, h, pb.worker_losses[n], pen, batch);
          if (k == t) uploads[n] = std::move(avg);
        }
      }
      res.max_upload_norm = std::max(res.max_upload_norm, norm(uploads[n]));
    }
    double sum_norm = detail::aggregate_norm(uploads, pb.dim);
    double delta0 = detail::faulty_aggregate_norm(pb, uploads);
    lfrpg_server_frame_end(server, i, h, uploads);

    // prev_w now holds this frame's slot models; last slot is the live model.
    std::vector<const Vec*> models(h.q, nullptr);
    for (std::size_t n = 0; n < h.q; ++n) models[n] = &workers[n].prev_w[t - 1];
    res.records.push_back(detail::round_metrics(pb, i, server.w, models, sum_norm, delta0));
    if (pb.record_server_trajectory) res.server_trajectory.push_back(server.w);

    // Frame-averaged iterate (server model is constant within the frame).
    std::vector<Vec> avg_models(h.q);
    std::vector<const Vec*> avg_ptrs(h.q, nullptr);
    for (std::size_t n : pb.reliable_workers()) {
      Vec avg(pb.dim, 0.0);
      for (std::size_t k = 0; k < t; ++k) axpy(avg, 1.0 / double(t), workers[n].prev_w[k]);
      avg_models[n] = std::move(avg);
      avg_ptrs[n] = &avg_models[n];
    }
    res.avg_iter_loss.push_back(detail::objective_over_reliable(pb, server.w, avg_ptrs));
  }
  res.final_server_w = server.w;
  res.final_worker_w.resize(h.q);
  for (std::size_t n : pb.reliable_workers()) res.final_worker_w[n] = workers[n].prev_w[t - 1];
  return res;
}

/// Run one of the benchmark aggregation schemes with the same telemetry:
/// RSA exchanges sign vectors against local models; Krum and GeoMed
/// aggregate uploaded local models; MeanSGD averages uploaded gradients.
inline RunResult run_baseline(const Problem& pb, const AggregationRule& rule) {
  pb.validate();
  const HyperParams& h = pb.hyper;
  Vec w0(pb.dim, 0.0);
  std::vector<Vec> local(h.q, Vec(pb.dim, 0.0));  // persistent models (RSA)
  RunResult res;
  res.records.reserve(h.rounds);
  for (std::size_t k = 1; k <= h.rounds; ++k) {
    double eta = benchmark_step(rule.step_scale, k);
    std::vector<Vec> uploads(h.q);
    std::vector<Vec> candidates(h.q);  // local models (Krum/GeoMed)
    for (std::size_t n = 0; n < h.q; ++n) {
      bool gaussian = pb.attack.is_faulty(n) && pb.attack.kind == AttackSpec::Kind::Gaussian;
      Rng attack_rng = keyed_stream(h.seed, StreamKind::Attack, n, k, 1);
      switch (rule.kind) {
        case AggregationRule::Kind::RSA: {
          if (gaussian) {
            Vec fab = gaussian_model(pb.dim, pb.attack.scale, attack_rng);
            uploads[n] = elementwise_sign(sub(w0, fab));
          } else {
            uploads[n] = elementwise_sign(sub(w0, local[n]));
            std::vector<std::size_t> batch = detail::draw_batch(pb, n, k, 1);
            Vec g = loss_eval(pb.worker_losses[n], local[n], batch).grad;
            axpy(g, h.lambda, elementwise_sign(sub(local[n], w0)));
            axpy(local[n], -eta, g);
          }
          break;
        }
        case AggregationRule::Kind::Krum:
        case AggregationRule::Kind::GeoMed: {
          if (gaussian) {
            candidates[n] = gaussian_model(pb.dim, pb.attack.scale, attack_rng);
          } else {
            std::vector<std::size_t> batch = detail::draw_batch(pb, n, k, 1);
            Vec g = loss_eval(pb.worker_losses[n], w0, batch).grad;
            candidates[n] = w0;
            axpy(candidates[n], -eta, g);
          }
          uploads[n] = candidates[n];
          break;
        }
        case AggregationRule::Kind::MeanSGD: {
          if (gaussian)
            uploads[n] = gaussian_model(pb.dim, pb.attack.scale, attack_rng);
          else {
            std::vector<std::size_t> batch = detail::draw_batch(pb, n, k, 1);
            uploads[n] = loss_eval(pb.worker_losses[n], w0, batch).grad;
          }
          break;
        }
      }
    }
    double sum_norm = detail::aggregate_norm(uploads, pb.dim);
    double delta0 = detail::faulty_aggregate_norm(pb, uploads);

    switch (rule.kind) {
      case AggregationRule::Kind::RSA: {
        Vec dir = loss_eval(pb.f0, w0).grad;
        Vec sign_sum(pb.dim, 0.0);
        for (const Vec& s : uploads) axpy(sign_sum, 1.0, s);
        axpy(dir, h.lambda, sign_sum);
        axpy(w0, -eta, dir);
        break;
      }
      case AggregationRule::Kind::Krum:
        w0 = candidates[krum_select(candidates, rule.krum_assumed_faulty)];
        break;
      case AggregationRule::Kind::GeoMed:
        w0 = geomed_weiszfeld(candidates, rule.geomed_tol, rule.geomed_max_iter);
        break;
      case AggregationRule::Kind::MeanSGD: {
        Vec mean(pb.dim, 0.0);
        for (const Vec& g : uploads) axpy(mean, 1.0 / double(h.q), g);
        axpy(w0, -eta, mean);
        break;
      }
    }
    require_finite(w0, "baseline server model");

    std::vector<const Vec*> models(h.q, nullptr);
    for (std::size_t n = 0; n < h.q; ++n) {
      switch (rule.kind) {
        case AggregationRule::Kind::RSA: models[n] = &local[n]; break;
        case AggregationRule::Kind::Krum:
        case AggregationRule::Kind::GeoMed: models[n] = &candidates[n]; break;
        case AggregationRule::Kind::MeanSGD: models[n] = &w0; break;
      }
    }
    res.records.push_back(detail::round_metrics(pb, k, w0, models, sum_norm, delta0));
    if (pb.record_server_trajectory) res.server_trajectory.push_back(w0);
  }
  res.final_server_w = w0;
  res.final_worker_w.resize(h.q);
  if (rule.kind == AggregationRule::Kind::RSA)
    for (std::size_t n : pb.reliable_workers()) res.final_worker_w[n] = local[n];
  return res;
}

}  // namespace fedres
