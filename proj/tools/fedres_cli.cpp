// Command-line front end: run experiments, emit theoretical bound curves,
// and inspect shard partitions.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fedres/fedres.hpp"
#include "fedres/theorems.hpp"

namespace {

int run_command(const std::string& config_path, long long seed_override,
                const std::string& out_override) {
  fedres::RunConfig cfg = fedres::parse_config(config_path);
  if (seed_override >= 0) cfg.hyper.seed = std::uint64_t(seed_override);
  if (!out_override.empty()) {
    cfg.output.metrics = out_override;
    cfg.output.resolved = out_override + ".resolved.ini";
  }
  fedres::RunResult res = fedres::run_experiment(cfg);
  const fedres::MetricsRecord& last = res.records.back();
  std::cout << "algorithm=" << fedres::algorithm_name(cfg.algorithm)
            << " rounds=" << res.records.size() << " final_loss_F=" << last.loss_f
            << " final_test_acc=" << last.test_acc << " metrics=" << cfg.output.metrics
            << "\n";
  return 0;
}

int bound_command(const std::string& config_path, const std::string& out_path) {
  fedres::RunConfig cfg = fedres::parse_config(config_path);
  if (cfg.data.kind != fedres::DataConfig::Kind::Synthetic)
    throw fedres::ConfigError("bound: requires synthetic data (u* must be computable)");
  if (cfg.algorithm != fedres::RunConfig::Algorithm::Frpg &&
      cfg.algorithm != fedres::RunConfig::Algorithm::Lfrpg)
    throw fedres::ConfigError("bound: algorithm must be frpg or lfrpg");

  fedres::Experiment ex = fedres::build_experiment(cfg);
  fedres::TheoremSetup setup = fedres::theorem_setup(ex.problem);
  fedres::BoundCurve curve =
      cfg.algorithm == fedres::RunConfig::Algorithm::Frpg
          ? fedres::compute_frpg_bound(ex.cfg.hyper, setup.inputs, ex.cfg.hyper.rounds)
          : fedres::compute_lfrpg_bound(ex.cfg.hyper, setup.inputs, ex.cfg.hyper.rounds);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw fedres::DataError(out_path + ": cannot open for writing");
    out = &file;
  }
  (*out) << "round,bound\n";
  char buf[40];
  for (std::size_t k = 1; k <= curve.rhs.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", curve.rhs[k - 1]);
    (*out) << k << ',' << buf << '\n';
  }
  std::cerr << "unspecified-constant neighborhood lambda^2 B^2 G / delta0 = "
            << curve.neighborhood << "\n";
  return 0;
}

int partition_command(const std::string& config_path) {
  fedres::RunConfig cfg = fedres::parse_config(config_path);
  if (cfg.data.kind == fedres::DataConfig::Kind::Synthetic)
    throw fedres::ConfigError("partition: requires a labeled dataset");
  fedres::Experiment ex = fedres::build_experiment(cfg);
  const fedres::Dataset& ds = *ex.train;
  std::cout << "worker,shard_size";
  for (int c = 0; c < ds.classes; ++c) std::cout << ",label" << c;
  std::cout << "\n";
  for (std::size_t n = 0; n < ex.assignment.shards.size(); ++n) {
    std::vector<std::size_t> hist(std::size_t(ds.classes), 0);
    for (std::size_t idx : ex.assignment.shards[n]) ++hist[std::size_t(ds.labels[idx])];
    std::cout << n << ',' << ex.assignment.shards[n].size();
    for (std::size_t h : hist) std::cout << ',' << h;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-resilient federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  long long seed_override = -1;
  std::string out_override;

  CLI::App* run = app.add_subcommand("run", "execute an experiment from a config file");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--out", out_override, "override the metrics output path");

  std::string bound_out;
  CLI::App* bound = app.add_subcommand("bound", "emit the convergence-bound envelope as CSV");
  bound->add_option("--config", config_path, "config file path")->required();
  bound->add_option("--out", bound_out, "CSV output path (stdout when omitted)");

  CLI::App* part = app.add_subcommand("partition", "dump per-worker shard label histograms");
  part->add_option("--config", config_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path, seed_override, out_override);
    if (bound->parsed()) return bound_command(config_path, bound_out);
    if (part->parsed()) return partition_command(config_path);
  } catch (const fedres::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fedres::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
