#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fedres/errors.hpp"
#include "fedres/rng.hpp"
#include "fedres/vec.hpp"

namespace fedres {

/// In-memory dataset: row-major feature matrix plus integer labels.
struct Dataset {
  std::vector<double> features;  // m x p, row-major
  std::vector<int> labels;       // m entries in 0..classes-1
  std::size_t rows = 0;
  std::size_t cols = 0;
  int classes = 0;

  const double* row(std::size_t i) const { return features.data() + i * cols; }
};

/// Per-worker index lists into the training set.
struct ShardAssignment {
  std::vector<std::vector<std::size_t>> shards;  // one entry per worker
};

namespace detail {

inline std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4))
    throw DataError(path + ": truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace detail

/// Parse an IDX image/label file pair (big-endian magics 0x00000803 and
/// 0x00000801, unsigned byte payloads). Pixels are scaled by 1/255.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw DataError(images_path + ": cannot open");
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw DataError(labels_path + ": cannot open");

  std::uint32_t img_magic = detail::read_be_u32(img, images_path);
  if (img_magic != 0x00000803u)
    throw DataError(images_path + ": bad magic (expected 0x00000803)");
  std::uint32_t count = detail::read_be_u32(img, images_path);
  std::uint32_t rows = detail::read_be_u32(img, images_path);
  std::uint32_t cols = detail::read_be_u32(img, images_path);

  std::uint32_t lab_magic = detail::read_be_u32(lab, labels_path);
  if (lab_magic != 0x00000801u)
    throw DataError(labels_path + ": bad magic (expected 0x00000801)");
  std::uint32_t lab_count = detail::read_be_u32(lab, labels_path);
  if (lab_count != count)
    throw DataError(images_path + ": image count " + std::to_string(count) +
                    " does not match label count " + std::to_string(lab_count));

  std::size_t pixels = std::size_t(rows) * cols;
  std::vector<unsigned char> buf(pixels);
  Dataset ds;
  ds.rows = count;
  ds.cols = pixels;
  ds.features.resize(std::size_t(count) * pixels);
  ds.labels.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), std::streamsize(pixels)))
      throw DataError(images_path + ": truncated image payload at sample " +
                      std::to_string(i));
    for (std::size_t j = 0; j < pixels; ++j)
      ds.features[std::size_t(i) * pixels + j] = buf[j] / 255.0;
    unsigned char y = 0;
    if (!lab.read(reinterpret_cast<char*>(&y), 1))
      throw DataError(labels_path + ": truncated label payload at sample " +
                      std::to_string(i));
    ds.labels[i] = int(y);
  }
  int max_label = 0;
  for (int y : ds.labels) max_label = std::max(max_label, y);
  ds.classes = max_label + 1;
  return ds;
}

/// Load a rectangular numeric CSV. A non-numeric first row is treated as a
/// header and skipped. feature_cols selects columns (in order); label_col is
/// cast to int.
inline Dataset load_csv(const std::string& path, const std::vector<std::size_t>& feature_cols,
                        std::size_t label_col) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  Dataset ds;
  ds.cols = feature_cols.size();
  std::string line;
  std::size_t lineno = 0;
  std::size_t expected_fields = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        fields.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (lineno == 1) continue;  // header row
      throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
    if (expected_fields == 0) expected_fields = fields.size();
    if (fields.size() != expected_fields)
      throw DataError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(expected_fields) + ")");
    if (label_col >= fields.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": label column " +
                      std::to_string(label_col) + " out of range");
    for (std::size_t c : feature_cols) {
      if (c >= fields.size())
        throw DataError(path + ":" + std::to_string(lineno) + ": feature column " +
                        std::to_string(c) + " out of range");
      ds.features.push_back(fields[c]);
    }
    ds.labels.push_back(static_cast<int>(fields[label_col]));
    ++ds.rows;
  }
  if (ds.rows == 0) throw DataError(path + ": no data rows");
  int max_label = 0;
  for (int y : ds.labels) {
    if (y < 0) throw DataError(path + ": negative label");
    max_label = std::max(max_label, y);
  }
  ds.classes = max_label + 1;
  return ds;
}

/// Heterogeneous label-skew partition. Samples are sorted by label and split
/// into Q/2 contiguous label groups (label-pure when the group count equals
/// the class count). Workers 2j and 2j+1 share group g(j): odd pairs receive
/// the lower-label groups and even pairs the upper ones, so half the workers
/// never see the upper half of the label range. With remove_upper, labels
/// >= ceil(C/2) are additionally filtered from odd pairs' shards. Each pair's
/// samples are split disjointly between its two workers, and all shards are
/// truncated to a common size.
inline ShardAssignment partition_heterogeneous(const Dataset& ds, std::size_t q,
                                               std::uint64_t seed, bool remove_upper = true) {
  if (q == 0 || q % 2 != 0) throw ConfigError("partition: Q must be positive and even");
  if (ds.rows < q) throw DataError("partition: fewer samples than workers");
  std::size_t pairs = q / 2;

  std::vector<std::size_t> order(ds.rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.labels[a] < ds.labels[b]; });

  // Contiguous label groups; label-pure split when pairs == classes.
  std::vector<std::vector<std::size_t>> groups(pairs);
  if (pairs == std::size_t(ds.classes)) {
    for (std::size_t idx : order) groups[ds.labels[idx]].push_back(idx);
  } else {
    for (std::size_t g = 0; g < pairs; ++g) {
      std::size_t lo = g * ds.rows / pairs;
      std::size_t hi = (g + 1) * ds.rows / pairs;
      groups[g].assign(order.begin() + lo, order.begin() + hi);
    }
  }

  // Deal groups to pairs: odd pairs get the low-label groups, even pairs the rest.
  std::vector<std::size_t> group_of_pair(pairs);
  std::size_t odd_pairs = pairs / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (p % 2 == 1)
      group_of_pair[p] = p / 2;  // pairs 1,3,5,... <- groups 0,1,2,...
    else
      group_of_pair[p] = odd_pairs + p / 2;  // pairs 0,2,4,... <- upper groups
  }

  int upper_start = (ds.classes + 1) / 2;
  ShardAssignment out;
  out.shards.resize(q);
  std::size_t min_size = std::size_t(-1);
  for (std::size_t p = 0; p < pairs; ++p) {
    std::vector<std::size_t> pool = groups[group_of_pair[p]];
    if (remove_upper && p % 2 == 1) {
      std::erase_if(pool, [&](std::size_t idx) { return ds.labels[idx] >= upper_start; });
    }
    if (pool.size() < 2)
      throw DataError("partition: pair " + std::to_string(p) +
                      " has an empty or singleton shard pool after label removal");
    // Seeded shuffle, then disjoint halves for the two workers of the pair.
    Rng rng = keyed_stream(seed, StreamKind::Partition, p);
    for (std::size_t i = pool.size() - 1; i > 0; --i)
      std::swap(pool[i], pool[rng.next_index(i + 1)]);
    std::size_t half = pool.size() / 2;
    out.shards[2 * p].assign(pool.begin(), pool.begin() + half);
    out.shards[2 * p + 1].assign(pool.begin() + half, pool.begin() + 2 * half);
    min_size = std::min(min_size, half);
  }
  for (auto& shard : out.shards) shard.resize(min_size);
  return out;
}

/// Uniform with-replacement mini-batch draw from a shard, keyed by
/// (seed, worker, round, slot).
inline std::vector<std::size_t> sample_minibatch(const std::vector<std::size_t>& shard,
                                                 std::size_t size, Rng& rng) {
  if (shard.empty()) throw ConfigError("sample_minibatch: empty shard");
  std::vector<std::size_t> batch(size);
  for (auto& idx : batch) idx = shard[rng.next_index(shard.size())];
  return batch;
}

}  // namespace fedres
