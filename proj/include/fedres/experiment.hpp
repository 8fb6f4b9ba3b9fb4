#pragma once

#include <chrono>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fedres/config.hpp"
#include "fedres/data.hpp"
#include "fedres/runner.hpp"
#include "fedres/synthetic.hpp"

namespace fedres {

/// A fully materialized experiment: owned datasets plus the Problem wired to
/// them. Dataset pointers inside the problem stay valid for the lifetime of
/// this object.
struct Experiment {
  RunConfig cfg;
  std::unique_ptr<Dataset> train, test, flipped;
  ShardAssignment assignment;
  Problem problem;
};

/// Load data, partition shards, resolve estimated constants and wire the
/// per-worker loss specs.
inline Experiment build_experiment(RunConfig cfg) {
  Experiment ex;
  HyperParams& h = cfg.hyper;

  if (cfg.data.kind == DataConfig::Kind::Synthetic) {
    std::vector<QuadraticLoss> quads =
        synth_quadratic(cfg.data.dim, h.q, h.delta_n, h.lip_n, h.seed);
    ex.problem.dim = cfg.data.dim;
    ex.problem.f0 = SquareNormLoss{h.delta0};
    for (auto& qd : quads) ex.problem.worker_losses.emplace_back(std::move(qd));
  } else {
    if (cfg.data.kind == DataConfig::Kind::Idx) {
      ex.train = std::make_unique<Dataset>(load_idx(cfg.data.train_images, cfg.data.train_labels));
      if (!cfg.data.test_images.empty())
        ex.test = std::make_unique<Dataset>(load_idx(cfg.data.test_images, cfg.data.test_labels));
    } else {
      // All non-label columns are features, in file order.
      std::ifstream peek(cfg.data.csv_train);
      if (!peek) throw DataError(cfg.data.csv_train + ": cannot open");
      std::string first;
      std::getline(peek, first);
      std::size_t ncols = 1 + std::size_t(std::count(first.begin(), first.end(), ','));
      std::vector<std::size_t> feature_cols;
      for (std::size_t c = 0; c < ncols; ++c)
        if (c != cfg.data.label_col) feature_cols.push_back(c);
      ex.train = std::make_unique<Dataset>(load_csv(cfg.data.csv_train, feature_cols, cfg.data.label_col));
      if (!cfg.data.csv_test.empty())
        ex.test = std::make_unique<Dataset>(load_csv(cfg.data.csv_test, feature_cols, cfg.data.label_col));
    }
    if (ex.test && ex.test->cols != ex.train->cols)
      throw DataError("train/test feature dimension mismatch");

    ex.assignment = partition_heterogeneous(*ex.train, h.q, h.seed, cfg.data.remove_upper);
    ex.problem.shards = ex.assignment.shards;
    ex.problem.dim = ex.train->cols * std::size_t(ex.train->classes);
    ex.problem.f0 = SquareNormLoss{h.delta0};
    ex.problem.train = ex.train.get();
    ex.problem.test = ex.test.get();

    if (cfg.lip_auto && h.lip_n <= 0.0) {
      double worst = 0.0;
      for (const auto& shard : ex.assignment.shards)
        worst = std::max(worst, estimate_lipschitz(*ex.train, shard, h.delta_n));
      h.lip_n = worst;
    }

    const Dataset* clean = ex.train.get();
    const Dataset* for_faulty = clean;
    if (cfg.attack.kind == AttackSpec::Kind::LabelFlip) {
      ex.flipped = std::make_unique<Dataset>(corrupt_labels(*ex.train));
      for_faulty = ex.flipped.get();
    }
    for (std::size_t n = 0; n < h.q; ++n) {
      const Dataset* src = cfg.attack.is_faulty(n) ? for_faulty : clean;
      ex.problem.worker_losses.emplace_back(
          LogisticLoss{ex.train->cols, ex.train->classes, h.delta_n, src});
    }
  }

  ex.problem.hyper = h;
  ex.problem.attack = cfg.attack;
  ex.cfg = std::move(cfg);
  ex.problem.validate();
  return ex;
}

/// Dispatch a built experiment to the right runner.
inline RunResult dispatch_run(const Experiment& ex) {
  switch (ex.cfg.algorithm) {
    case RunConfig::Algorithm::Frpg: return run_frpg(ex.problem);
    case RunConfig::Algorithm::Lfrpg: return run_lfrpg(ex.problem);
    default: return run_baseline(ex.problem, ex.cfg.rule);
  }
}

/// Full harness entry: build, run, persist the metrics CSV and the resolved
/// config echo. Per-round wall_ms stays zero so that equal (config, seed)
/// runs produce byte-identical metrics files; total elapsed time is recorded
/// as a comment in the resolved dump.
inline RunResult run_experiment(const RunConfig& cfg_in) {
  auto t0 = std::chrono::steady_clock::now();
  Experiment ex = build_experiment(cfg_in);
  RunResult res = dispatch_run(ex);
  auto t1 = std::chrono::steady_clock::now();
  double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  write_metrics(res.records, ex.cfg.output.metrics);
  std::ofstream resolved(ex.cfg.output.resolved);
  if (!resolved) throw DataError(ex.cfg.output.resolved + ": cannot open for writing");
  resolved << dump_resolved_config(ex.cfg, wall_ms);
  return res;
}

}  // namespace fedres
