#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fedres/errors.hpp"

namespace fedres {

/// One row of per-communication-round telemetry.
struct MetricsRecord {
  std::size_t round = 0;
  double loss_f = 0.0;      // penalized objective over the reliable workers
  double train_acc = 0.0;   // top-1 of the server model (0 for synthetic runs)
  double test_acc = 0.0;
  double sum_g_norm = 0.0;  // norm of the aggregated uploads
  double delta0_norm = 0.0; // norm of the faulty workers' aggregate upload
  double wall_ms = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "round,loss_F,train_acc,test_acc,sum_g_norm,delta0_norm,wall_ms";

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// Streaming CSV writer: records go to disk as they are appended, so long
/// runs never hold the full trajectory in memory.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw DataError(path + ": cannot open for writing");
    out_ << kMetricsHeader << '\n';
  }

  void append(const MetricsRecord& r) {
    out_ << r.round << ',' << detail::fmt17(r.loss_f) << ',' << detail::fmt17(r.train_acc)
         << ',' << detail::fmt17(r.test_acc) << ',' << detail::fmt17(r.sum_g_norm) << ','
         << detail::fmt17(r.delta0_norm) << ',' << detail::fmt17(r.wall_ms) << '\n';
    if (!out_) throw DataError(path_ + ": write failed");
  }

  void close() {
    out_.flush();
    out_.close();
    if (!out_ && !out_.eof()) throw DataError(path_ + ": flush failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

inline void write_metrics(const std::vector<MetricsRecord>& records, const std::string& path) {
  if (records.empty()) throw ConfigError("write_metrics: no records");
  MetricsWriter w(path);
  for (const auto& r : records) w.append(r);
  w.close();
}

/// Parse a metrics CSV written by MetricsWriter (round-trip exact).
inline std::vector<MetricsRecord> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw DataError(path + ": bad metrics header");
  std::vector<MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw DataError(path + ": bad metrics row: " + line);
    MetricsRecord r;
    r.round = std::stoull(cells[0]);
    r.loss_f = std::stod(cells[1]);
    r.train_acc = std::stod(cells[2]);
    r.test_acc = std::stod(cells[3]);
    r.sum_g_norm = std::stod(cells[4]);
    r.delta0_norm = std::stod(cells[5]);
    r.wall_ms = std::stod(cells[6]);
    out.push_back(r);
  }
  return out;
}

}  // namespace fedres
