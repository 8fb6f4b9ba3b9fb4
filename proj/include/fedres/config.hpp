#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fedres/adversary.hpp"
#include "fedres/baselines.hpp"
#include "fedres/errors.hpp"
#include "fedres/params.hpp"

namespace fedres {

struct DataConfig {
  enum class Kind { Idx, Csv, Synthetic };
  Kind kind = Kind::Synthetic;
  std::string train_images, train_labels, test_images, test_labels;  // idx
  std::string csv_train, csv_test;                                   // csv
  std::size_t label_col = 0;
  std::size_t dim = 20;  // synthetic model dimension
  bool remove_upper = true;
};

struct OutputConfig {
  std::string metrics = "metrics.csv";
  std::string resolved;  // defaults to metrics path + ".resolved.ini"
};

/// Fully resolved run description: algorithm, data source, hyper-parameters,
/// attack, baseline rule knobs and output paths.
struct RunConfig {
  enum class Algorithm { Frpg, Lfrpg, Rsa, Krum, Geomed, MeanSgd };
  Algorithm algorithm = Algorithm::Frpg;
  DataConfig data;
  HyperParams hyper;
  AttackSpec attack;
  AggregationRule rule;
  OutputConfig output;
  bool lip_auto = true;  // L_n estimated from data when not given
};

namespace detail {

struct IniEntry {
  std::string value;
  std::size_t line = 0;
};

struct IniFile {
  // section -> key -> entry
  std::map<std::string, std::map<std::string, IniEntry>> sections;
  std::string origin;
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline IniFile parse_ini(std::istream& in, const std::string& origin) {
  IniFile ini;
  ini.origin = origin;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any section");
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    ini.sections[section][key] = IniEntry{value, lineno};
  }
  return ini;
}

class IniReader {
 public:
  IniReader(const IniFile& ini, const std::string& section) : ini_(ini), section_(section) {
    auto it = ini.sections.find(section);
    if (it != ini.sections.end()) entries_ = &it->second;
  }

  bool has(const std::string& key) const { return entries_ && entries_->count(key); }

  std::string str(const std::string& key, const std::string& fallback) {
    mark(key);
    if (!has(key)) return fallback;
    return entries_->at(key).value;
  }

  double num(const std::string& key, double fallback) {
    mark(key);
    if (!has(key)) return fallback;
    const IniEntry& e = entries_->at(key);
    try {
      std::size_t pos = 0;
      double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where(e) + ": '" + key + "' expects a number, got '" + e.value + "'");
    }
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    mark(key);
    if (!has(key)) return fallback;
    const IniEntry& e = entries_->at(key);
    try {
      std::size_t pos = 0;
      long long v = std::stoll(e.value, &pos);
      if (pos != e.value.size() || v < 0) throw std::invalid_argument(e.value);
      return std::size_t(v);
    } catch (const std::exception&) {
      throw ConfigError(where(e) + ": '" + key + "' expects a non-negative integer, got '" +
                        e.value + "'");
    }
  }

  bool flag(const std::string& key, bool fallback) {
    mark(key);
    if (!has(key)) return fallback;
    const IniEntry& e = entries_->at(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError(where(e) + ": '" + key + "' expects true/false, got '" + e.value + "'");
  }

  void reject_unknown() const {
    if (!entries_) return;
    for (const auto& [key, entry] : *entries_) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw ConfigError(where(entry) + ": unknown key '" + key + "' in section [" + section_ +
                          "]");
    }
  }

  std::string where(const IniEntry& e) const {
    return ini_.origin + ":" + std::to_string(e.line);
  }

 private:
  void mark(const std::string& key) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.push_back(key);
  }

  const IniFile& ini_;
  std::string section_;
  const std::map<std::string, IniEntry>* entries_ = nullptr;
  std::vector<std::string> seen_;
};

inline RunConfig::Algorithm parse_algorithm(const std::string& name, const std::string& ctx) {
  if (name == "frpg") return RunConfig::Algorithm::Frpg;
  if (name == "lfrpg") return RunConfig::Algorithm::Lfrpg;
  if (name == "rsa") return RunConfig::Algorithm::Rsa;
  if (name == "krum") return RunConfig::Algorithm::Krum;
  if (name == "geomed") return RunConfig::Algorithm::Geomed;
  if (name == "sgd") return RunConfig::Algorithm::MeanSgd;
  throw ConfigError(ctx + ": unknown algorithm '" + name +
                    "' (expected frpg|lfrpg|rsa|krum|geomed|sgd)");
}

}  // namespace detail

inline const char* algorithm_name(RunConfig::Algorithm a) {
  switch (a) {
    case RunConfig::Algorithm::Frpg: return "frpg";
    case RunConfig::Algorithm::Lfrpg: return "lfrpg";
    case RunConfig::Algorithm::Rsa: return "rsa";
    case RunConfig::Algorithm::Krum: return "krum";
    case RunConfig::Algorithm::Geomed: return "geomed";
    case RunConfig::Algorithm::MeanSgd: return "sgd";
  }
  return "?";
}

/// Parse and validate a config. Paper-default hyper-parameters are prefilled
/// (lambda 1.6, mu 1e-3, delta 0.003, Q 20, N 16, T 10; batch 15, or 10 under
/// the Gaussian attack). Unknown keys and constraint violations raise
/// ConfigError with file:line context.
inline RunConfig parse_config_stream(std::istream& in, const std::string& origin) {
  detail::IniFile ini = detail::parse_ini(in, origin);
  for (const auto& [section, _] : ini.sections) {
    if (section != "algorithm" && section != "data" && section != "hyper" &&
        section != "attack" && section != "output")
      throw ConfigError(origin + ": unknown section [" + section + "]");
  }
  RunConfig cfg;

  detail::IniReader alg(ini, "algorithm");
  cfg.algorithm = detail::parse_algorithm(alg.str("name", "frpg"), origin);
  alg.reject_unknown();

  detail::IniReader data(ini, "data");
  std::string kind = data.str("kind", "synthetic");
  if (kind == "idx")
    cfg.data.kind = DataConfig::Kind::Idx;
  else if (kind == "csv")
    cfg.data.kind = DataConfig::Kind::Csv;
  else if (kind == "synthetic")
    cfg.data.kind = DataConfig::Kind::Synthetic;
  else
    throw ConfigError(origin + ": unknown data kind '" + kind + "' (expected idx|csv|synthetic)");
  cfg.data.train_images = data.str("train_images", "");
  cfg.data.train_labels = data.str("train_labels", "");
  cfg.data.test_images = data.str("test_images", "");
  cfg.data.test_labels = data.str("test_labels", "");
  cfg.data.csv_train = data.str("csv_train", "");
  cfg.data.csv_test = data.str("csv_test", "");
  cfg.data.label_col = data.count("label_col", 0);
  cfg.data.dim = data.count("dim", 20);
  cfg.data.remove_upper = data.flag("remove_upper", true);
  data.reject_unknown();

  detail::IniReader attack(ini, "attack");
  std::string akind = attack.str("kind", "none");
  if (akind == "none")
    cfg.attack.kind = AttackSpec::Kind::None;
  else if (akind == "labelflip")
    cfg.attack.kind = AttackSpec::Kind::LabelFlip;
  else if (akind == "gaussian")
    cfg.attack.kind = AttackSpec::Kind::Gaussian;
  else
    throw ConfigError(origin + ": unknown attack kind '" + akind +
                      "' (expected none|labelflip|gaussian)");
  cfg.attack.scale = attack.num("scale", 1e4);
  attack.reject_unknown();

  detail::IniReader hyper(ini, "hyper");
  HyperParams& h = cfg.hyper;
  h.lambda = hyper.num("lambda", 1.6);
  h.mu = hyper.num("mu", 1e-3);
  h.delta0 = hyper.num("delta0", 0.003);
  h.delta_n = hyper.num("delta_n", 0.003);
  h.lip0 = hyper.num("L0", h.delta0);
  std::string lip_n = hyper.str("L_n", "auto");
  if (lip_n == "auto") {
    cfg.lip_auto = true;
    h.lip_n = 0.0;
  } else {
    cfg.lip_auto = false;
    try {
      h.lip_n = std::stod(lip_n);
    } catch (const std::exception&) {
      throw ConfigError(origin + ": 'L_n' expects a number or 'auto', got '" + lip_n + "'");
    }
    if (h.lip_n <= 0.0) throw ConfigError(origin + ": 'L_n' must be positive");
  }
  h.q = hyper.count("Q", 20);
  h.n_reliable = hyper.count("N", 16);
  h.frame_len = hyper.count("T", 10);
  h.rounds = hyper.count("rounds", 1000);
  std::size_t default_batch = cfg.attack.kind == AttackSpec::Kind::Gaussian ? 10 : 15;
  h.batch = hyper.count("batch", default_batch);
  h.full_batch = hyper.flag("full_batch", false);
  h.grad_power = hyper.num("G", 1.0);
  h.sigma_n = hyper.num("sigma_n", 0.0);
  h.seed = hyper.count("seed", 1);
  cfg.rule.step_scale = hyper.num("benchmark_step_scale", 3.0);
  cfg.rule.krum_assumed_faulty = hyper.count("krum_assumed_faulty", h.faulty());
  cfg.rule.geomed_tol = hyper.num("geomed_tol", 1e-8);
  cfg.rule.geomed_max_iter = hyper.count("geomed_max_iter", 1000);
  hyper.reject_unknown();

  detail::IniReader output(ini, "output");
  cfg.output.metrics = output.str("metrics", "metrics.csv");
  cfg.output.resolved = output.str("resolved", cfg.output.metrics + ".resolved.ini");
  output.reject_unknown();

  h.validate();
  cfg.attack.faulty = AttackSpec::last_b_of(h.q, h.faulty());
  switch (cfg.algorithm) {
    case RunConfig::Algorithm::Rsa:
    case RunConfig::Algorithm::Krum:
    case RunConfig::Algorithm::Geomed:
    case RunConfig::Algorithm::MeanSgd:
      cfg.rule.kind = cfg.algorithm == RunConfig::Algorithm::Rsa ? AggregationRule::Kind::RSA
                      : cfg.algorithm == RunConfig::Algorithm::Krum ? AggregationRule::Kind::Krum
                      : cfg.algorithm == RunConfig::Algorithm::Geomed
                          ? AggregationRule::Kind::GeoMed
                          : AggregationRule::Kind::MeanSGD;
      break;
    default:
      break;
  }
  if (cfg.algorithm == RunConfig::Algorithm::Krum && h.q < cfg.rule.krum_assumed_faulty + 3)
    throw ConfigError(origin + ": constraint violated: Q - krum_assumed_faulty - 2 >= 1");
  if (cfg.attack.kind == AttackSpec::Kind::LabelFlip &&
      cfg.data.kind == DataConfig::Kind::Synthetic)
    throw ConfigError(origin + ": label-flip attack requires a labeled dataset");
  if (cfg.data.kind == DataConfig::Kind::Synthetic && cfg.lip_auto)
    throw ConfigError(origin + ": 'L_n' must be set explicitly for synthetic data");
  if (cfg.data.kind == DataConfig::Kind::Idx &&
      (cfg.data.train_images.empty() || cfg.data.train_labels.empty()))
    throw ConfigError(origin + ": idx data requires train_images and train_labels");
  if (cfg.data.kind == DataConfig::Kind::Csv && cfg.data.csv_train.empty())
    throw ConfigError(origin + ": csv data requires csv_train");
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config_stream(in, path);
}

inline RunConfig parse_config_text(const std::string& text, const std::string& origin = "<inline>") {
  std::istringstream in(text);
  return parse_config_stream(in, origin);
}

/// Serialize the resolved configuration. The output is a valid config that
/// reproduces the identical run (estimated quantities are written as
/// explicit values).
inline std::string dump_resolved_config(const RunConfig& cfg, double total_wall_ms = -1.0) {
  std::ostringstream out;
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  if (total_wall_ms >= 0.0) out << "# total_wall_ms = " << num(total_wall_ms) << "\n";
  out << "[algorithm]\nname = " << algorithm_name(cfg.algorithm) << "\n\n";
  out << "[data]\n";
  switch (cfg.data.kind) {
    case DataConfig::Kind::Idx:
      out << "kind = idx\n";
      out << "train_images = " << cfg.data.train_images << "\n";
      out << "train_labels = " << cfg.data.train_labels << "\n";
      if (!cfg.data.test_images.empty()) out << "test_images = " << cfg.data.test_images << "\n";
      if (!cfg.data.test_labels.empty()) out << "test_labels = " << cfg.data.test_labels << "\n";
      break;
    case DataConfig::Kind::Csv:
      out << "kind = csv\n";
      out << "csv_train = " << cfg.data.csv_train << "\n";
      if (!cfg.data.csv_test.empty()) out << "csv_test = " << cfg.data.csv_test << "\n";
      out << "label_col = " << cfg.data.label_col << "\n";
      break;
    case DataConfig::Kind::Synthetic:
      out << "kind = synthetic\n";
      out << "dim = " << cfg.data.dim << "\n";
      break;
  }
  out << "remove_upper = " << (cfg.data.remove_upper ? "true" : "false") << "\n\n";
  out << "[hyper]\n";
  const HyperParams& h = cfg.hyper;
  out << "lambda = " << num(h.lambda) << "\n";
  out << "mu = " << num(h.mu) << "\n";
  out << "delta0 = " << num(h.delta0) << "\n";
  out << "delta_n = " << num(h.delta_n) << "\n";
  out << "L0 = " << num(h.lip0) << "\n";
  if (h.lip_n > 0.0)
    out << "L_n = " << num(h.lip_n) << "\n";
  else
    out << "L_n = auto\n";
  out << "Q = " << h.q << "\n";
  out << "N = " << h.n_reliable << "\n";
  out << "T = " << h.frame_len << "\n";
  out << "rounds = " << h.rounds << "\n";
  out << "batch = " << h.batch << "\n";
  out << "full_batch = " << (h.full_batch ? "true" : "false") << "\n";
  out << "G = " << num(h.grad_power) << "\n";
  out << "sigma_n = " << num(h.sigma_n) << "\n";
  out << "seed = " << h.seed << "\n";
  out << "benchmark_step_scale = " << num(cfg.rule.step_scale) << "\n";
  out << "krum_assumed_faulty = " << cfg.rule.krum_assumed_faulty << "\n";
  out << "geomed_tol = " << num(cfg.rule.geomed_tol) << "\n";
  out << "geomed_max_iter = " << cfg.rule.geomed_max_iter << "\n\n";
  out << "[attack]\n";
  switch (cfg.attack.kind) {
    case AttackSpec::Kind::None: out << "kind = none\n"; break;
    case AttackSpec::Kind::LabelFlip: out << "kind = labelflip\n"; break;
    case AttackSpec::Kind::Gaussian: out << "kind = gaussian\n"; break;
  }
  out << "scale = " << num(cfg.attack.scale) << "\n\n";
  out << "[output]\n";
  out << "metrics = " << cfg.output.metrics << "\n";
  out << "resolved = " << cfg.output.resolved << "\n";
  return out.str();
}

}  // namespace fedres
