#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "fedres/data.hpp"
#include "fedres/objective.hpp"
#include "fedres/synthetic.hpp"

using namespace fedres;

namespace {

Dataset balanced_dataset(std::size_t per_class, int classes) {
  Dataset ds;
  ds.classes = classes;
  ds.cols = 2;
  Rng rng(17);
  for (int c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      ds.features.push_back(rng.next_double());
      ds.features.push_back(rng.next_double());
      ds.labels.push_back(c);
      ++ds.rows;
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("idx loader round-trips the committed fixture") {
  Dataset ds = load_idx("tests/fixtures/mini_images.idx", "tests/fixtures/mini_labels.idx");
  REQUIRE(ds.rows == 2);
  REQUIRE(ds.cols == 4);
  CHECK(ds.labels == std::vector<int>{3, 9});
  CHECK(ds.features[0] == 0.0);
  CHECK(ds.features[1] == Catch::Approx(128.0 / 255.0));
  CHECK(ds.features[2] == 1.0);
  CHECK(ds.features[3] == Catch::Approx(7.0 / 255.0));
  CHECK(ds.features[4] == Catch::Approx(1.0 / 255.0));
  CHECK(ds.features[7] == Catch::Approx(4.0 / 255.0));
  CHECK(ds.classes == 10);
}

TEST_CASE("idx loader rejects malformed files") {
  CHECK_THROWS_AS(load_idx("tests/fixtures/empty.idx", "tests/fixtures/mini_labels.idx"),
                  DataError);
  CHECK_THROWS_AS(
      load_idx("tests/fixtures/mismatch_images.idx", "tests/fixtures/mismatch_labels.idx"),
      DataError);
  CHECK_THROWS_AS(load_idx("tests/fixtures/mini_labels.idx", "tests/fixtures/mini_labels.idx"),
                  DataError);  // wrong magic
  CHECK_THROWS_AS(load_idx("no/such/file.idx", "tests/fixtures/mini_labels.idx"), DataError);
}

TEST_CASE("csv loader: fixture values, header skip, errors") {
  Dataset ds = load_csv("tests/fixtures/mini.csv", {0, 1}, 2);
  REQUIRE(ds.rows == 3);
  CHECK(ds.cols == 2);
  CHECK(ds.features == std::vector<double>{0.5, 1.25, -2.0, 3.5, 4.0, 0.0});
  CHECK(ds.labels == std::vector<int>{0, 1, 2});
  CHECK(ds.classes == 3);

  CHECK_THROWS_AS(load_csv("tests/fixtures/ragged.csv", {0, 1}, 2), DataError);
  CHECK_THROWS_AS(load_csv("tests/fixtures/nonnumeric.csv", {0, 1}, 2), DataError);
  CHECK_THROWS_AS(load_csv("tests/fixtures/mini.csv", {0, 1}, 9), DataError);
}

TEST_CASE("heterogeneous partition: label-pure pairs, lower labels on odd pairs") {
  Dataset ds = balanced_dataset(40, 10);
  ShardAssignment sa = partition_heterogeneous(ds, 20, 1);
  REQUIRE(sa.shards.size() == 20);

  std::size_t size0 = sa.shards[0].size();
  CHECK(size0 > 0);
  std::set<std::size_t> seen;
  for (std::size_t n = 0; n < 20; ++n) {
    CHECK(sa.shards[n].size() == size0);  // evenly distributed
    for (std::size_t idx : sa.shards[n]) {
      CHECK(!seen.count(idx));  // pairwise disjoint
      seen.insert(idx);
    }
    // each pair is label-homogeneous
    int label = ds.labels[sa.shards[n][0]];
    for (std::size_t idx : sa.shards[n]) CHECK(ds.labels[idx] == label);
  }
  // workers of one pair share the label group
  for (std::size_t p = 0; p < 10; ++p)
    CHECK(ds.labels[sa.shards[2 * p][0]] == ds.labels[sa.shards[2 * p + 1][0]]);
  // odd pairs (workers 2,3, 6,7, ...) carry no upper-half labels
  for (std::size_t p = 1; p < 10; p += 2)
    for (std::size_t w : {2 * p, 2 * p + 1})
      for (std::size_t idx : sa.shards[w]) CHECK(ds.labels[idx] < 5);
}

TEST_CASE("partition is deterministic in (dataset, Q, seed)") {
  Dataset ds = balanced_dataset(30, 10);
  ShardAssignment a = partition_heterogeneous(ds, 20, 5);
  ShardAssignment b = partition_heterogeneous(ds, 20, 5);
  ShardAssignment c = partition_heterogeneous(ds, 20, 6);
  CHECK(a.shards == b.shards);
  CHECK(a.shards != c.shards);
}

TEST_CASE("partition: Q=2 without removal gives two disjoint equal halves") {
  Dataset ds = balanced_dataset(25, 4);
  ShardAssignment sa = partition_heterogeneous(ds, 2, 3, /*remove_upper=*/false);
  REQUIRE(sa.shards.size() == 2);
  CHECK(sa.shards[0].size() == 50);
  CHECK(sa.shards[1].size() == 50);
  std::set<std::size_t> all(sa.shards[0].begin(), sa.shards[0].end());
  for (std::size_t idx : sa.shards[1]) CHECK(!all.count(idx));
}

TEST_CASE("partition rejects bad shapes") {
  Dataset ds = balanced_dataset(10, 4);
  CHECK_THROWS_AS(partition_heterogeneous(ds, 3, 1), ConfigError);   // odd Q
  CHECK_THROWS_AS(partition_heterogeneous(ds, 0, 1), ConfigError);
  Dataset tiny = balanced_dataset(1, 2);
  CHECK_THROWS_AS(partition_heterogeneous(tiny, 20, 1), DataError);  // fewer samples than workers
}

TEST_CASE("minibatch: determinism, full-batch identity, uniformity") {
  std::vector<std::size_t> shard(50);
  for (std::size_t i = 0; i < 50; ++i) shard[i] = 100 + i;

  Rng r1 = keyed_stream(9, StreamKind::Minibatch, 2, 7, 1);
  Rng r2 = keyed_stream(9, StreamKind::Minibatch, 2, 7, 1);
  CHECK(sample_minibatch(shard, 16, r1) == sample_minibatch(shard, 16, r2));

  // full-batch flag path is the identity index set (see runner): here just
  // check the with-replacement draw stays inside the shard.
  Rng r3 = keyed_stream(9, StreamKind::Minibatch, 2, 8, 1);
  for (std::size_t idx : sample_minibatch(shard, 200, r3)) {
    CHECK(idx >= 100);
    CHECK(idx < 150);
  }

  // chi-square uniformity of index frequencies
  Rng r4 = keyed_stream(10, StreamKind::Minibatch, 0, 0, 0);
  std::vector<int> counts(50, 0);
  const int n = 100000;
  std::vector<std::size_t> batch = sample_minibatch(shard, n, r4);
  for (std::size_t idx : batch) ++counts[idx - 100];
  double expected = double(n) / 50.0;
  double chi2 = 0.0;
  for (int cnt : counts) chi2 += (cnt - expected) * (cnt - expected) / expected;
  double dof = 49.0;
  CHECK(chi2 < dof + 3.0 * std::sqrt(2.0 * dof));

  std::vector<std::size_t> empty;
  Rng r5(1);
  CHECK_THROWS_AS(sample_minibatch(empty, 4, r5), ConfigError);
}

TEST_CASE("penalized optimum of a synthetic instance has vanishing gradient") {
  std::size_t d = 6, n = 3;
  std::vector<QuadraticLoss> quads = synth_quadratic(d, n, 0.5, 3.0, 21);
  LossSpec f0 = SquareNormLoss{0.5};
  std::vector<LossSpec> specs(quads.begin(), quads.end());

  PenalizedObjective obj;
  obj.f0 = &f0;
  obj.pen = PenaltySpec{0.1, 0.4, 1.0};
  for (auto& s : specs) obj.losses.push_back(&s);

  JointPoint zero;
  zero.server = Vec(d, 0.0);
  zero.workers.assign(n, Vec(d, 0.0));
  double lip = 3.0 + 2.0 * double(n) * obj.pen.lambda / obj.pen.mu;
  JointPoint star = penalized_optimum(obj, zero, 0.5, lip, 1e-12);

  JointPoint g = obj.gradient(star);
  double gnorm = std::sqrt(dot(g.server, g.server) +
                           dot(g.workers[0], g.workers[0]) +
                           dot(g.workers[1], g.workers[1]) +
                           dot(g.workers[2], g.workers[2]));
  CHECK(gnorm < 1e-9);
  // objective at the optimum is below nearby perturbations
  JointPoint probe = star;
  probe.server[0] += 1e-4;
  CHECK(obj.value(star) <= obj.value(probe));
}

TEST_CASE("symmetric two-worker instance has the symmetric server optimum") {
  QuadraticLoss left, right;
  left.dim = right.dim = 1;
  left.a = {1.0};
  right.a = {1.0};
  left.b = {-1.0};
  right.b = {1.0};
  LossSpec f0 = SquareNormLoss{1.0};
  std::vector<LossSpec> specs{left, right};

  PenalizedObjective obj;
  obj.f0 = &f0;
  obj.pen = PenaltySpec{0.5, 0.3, 1.0};
  for (auto& s : specs) obj.losses.push_back(&s);

  JointPoint zero;
  zero.server = Vec(1, 0.0);
  zero.workers.assign(2, Vec(1, 0.0));
  JointPoint star = penalized_optimum(obj, zero, 1.0, 1.0 + 2.0 * 0.3 / 0.5, 1e-12);
  CHECK(std::abs(star.server[0]) < 1e-9);
  CHECK(star.workers[0][0] == Catch::Approx(-star.workers[1][0]).margin(1e-9));
}
