#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fedres/adversary.hpp"
#include "fedres/runner.hpp"
#include "fedres/synthetic.hpp"

using namespace fedres;

TEST_CASE("label flip: 9 - y skew, involution") {
  Dataset ds;
  ds.rows = 3;
  ds.cols = 1;
  ds.classes = 10;
  ds.features = {0.1, 0.2, 0.3};
  ds.labels = {3, 9, 0};

  Dataset flipped = corrupt_labels(ds);
  CHECK(flipped.labels == std::vector<int>{6, 0, 9});
  CHECK(flipped.features == ds.features);
  Dataset twice = corrupt_labels(flipped);
  CHECK(twice.labels == ds.labels);

  Dataset bad = ds;
  bad.labels[0] = 11;
  CHECK_THROWS_AS(corrupt_labels(bad), DataError);
}

TEST_CASE("gaussian fabrication: degenerate scale, scale match, keyed streams") {
  Rng z = keyed_stream(1, StreamKind::Attack, 0, 1, 1);
  Vec zero = gaussian_model(8, 0.0, z);
  CHECK(norm(zero) == 0.0);

  Rng big = keyed_stream(1, StreamKind::Attack, 0, 1, 1);
  const int n = 100000;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = gaussian_model(1, 1e4, big)[0];
    sum_sq += x * x;
  }
  double stddev = std::sqrt(sum_sq / n);
  CHECK(std::abs(stddev - 1e4) / 1e4 < 0.02);

  Rng w1 = keyed_stream(1, StreamKind::Attack, 1, 1, 1);
  Rng w2 = keyed_stream(1, StreamKind::Attack, 2, 1, 1);
  Rng s2 = keyed_stream(1, StreamKind::Attack, 1, 1, 2);
  Vec a = gaussian_model(4, 1.0, w1);
  Vec b = gaussian_model(4, 1.0, w2);
  Vec c = gaussian_model(4, 1.0, s2);
  CHECK(a != b);
  CHECK(a != c);
}

TEST_CASE("faulty uploads stay inside the protocol cap") {
  PenaltySpec pen{1e-3, 1.6, 1.0};
  Vec w0{0.5, -0.2, 1.0};

  // fabricating the broadcast itself yields a zero upload
  CHECK(norm(faulty_penalty_upload(pen, w0, w0)) == 0.0);

  // huge fabricated models saturate the Huber gradient: ||upload|| = lambda
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    Vec fab = rng.normal_vec(3, 1e10);
    double g = norm(faulty_penalty_upload(pen, w0, fab));
    CHECK(g <= 1.6);
    CHECK(g == Catch::Approx(1.6).epsilon(1e-9));
  }
}

TEST_CASE("attack kind is irrelevant when the faulty set is empty") {
  HyperParams h;
  h.q = 3;
  h.n_reliable = 3;
  h.delta0 = 0.5;
  h.lip0 = 0.5;
  h.delta_n = 0.5;
  h.lip_n = 2.0;
  h.lambda = 0.3;
  h.mu = 0.2;
  h.rounds = 25;
  h.seed = 5;

  Problem pb;
  pb.dim = 3;
  pb.f0 = SquareNormLoss{h.delta0};
  std::vector<QuadraticLoss> quads = synth_quadratic(3, 3, 0.5, 2.0, 9);
  for (auto& q : quads) pb.worker_losses.emplace_back(q);
  pb.hyper = h;

  Problem pb_gauss = pb;
  pb_gauss.attack.kind = AttackSpec::Kind::Gaussian;

  RunResult none = run_frpg(pb);
  RunResult gauss = run_frpg(pb_gauss);
  for (std::size_t i = 0; i < none.records.size(); ++i) {
    CHECK(none.records[i].loss_f == gauss.records[i].loss_f);
    CHECK(gauss.records[i].delta0_norm == 0.0);
  }
}

TEST_CASE("every upload in an attacked run respects the lambda cap") {
  HyperParams h;
  h.q = 6;
  h.n_reliable = 4;
  h.delta0 = 0.4;
  h.lip0 = 0.4;
  h.delta_n = 0.4;
  h.lip_n = 2.0;
  h.lambda = 1.6;
  h.mu = 1e-3;
  h.rounds = 40;
  h.frame_len = 3;
  h.seed = 6;

  Problem pb;
  pb.dim = 4;
  pb.f0 = SquareNormLoss{h.delta0};
  std::vector<QuadraticLoss> quads = synth_quadratic(4, 6, 0.4, 2.0, 13);
  for (auto& q : quads) pb.worker_losses.emplace_back(q);
  pb.hyper = h;
  pb.attack.kind = AttackSpec::Kind::Gaussian;
  pb.attack.scale = 1e10;
  pb.attack.faulty = AttackSpec::last_b_of(6, 2);

  RunResult frpg = run_frpg(pb);
  CHECK(frpg.max_upload_norm <= h.lambda * (1.0 + 1e-12));
  RunResult lfrpg = run_lfrpg(pb);
  CHECK(lfrpg.max_upload_norm <= h.lambda * (1.0 + 1e-12));
}
