#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fedres/penalty.hpp"
#include "fedres/rng.hpp"

using namespace fedres;

namespace {

// Independent numeric oracle for the prox: the objective c*p(x) + 1/2||x-v||^2
// is radially symmetric around v's direction, so the minimizer lies on the ray
// t * v/||v||, t in [0, ||v||]. Coarse grid plus golden-section refinement.
double huber_scalar(double mu, double t) {
  return t <= mu ? t * t / (2.0 * mu) : t - mu / 2.0;
}

double prox_objective_1d(double mu, double c, double r, double t) {
  return c * huber_scalar(mu, t) + 0.5 * (t - r) * (t - r);
}

double numeric_prox_radius(double mu, double c, double r) {
  double lo = 0.0, hi = r;
  double best_t = 0.0, best_f = prox_objective_1d(mu, c, r, 0.0);
  const int grid = 1000;
  for (int i = 1; i <= grid; ++i) {
    double t = r * double(i) / grid;
    double f = prox_objective_1d(mu, c, r, t);
    if (f < best_f) {
      best_f = f;
      best_t = t;
    }
  }
  lo = std::max(0.0, best_t - r / grid);
  hi = std::min(r, best_t + r / grid);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = prox_objective_1d(mu, c, r, x1), f2 = prox_objective_1d(mu, c, r, x2);
  while (b - a > 1e-13 * std::max(1.0, r)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = prox_objective_1d(mu, c, r, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = prox_objective_1d(mu, c, r, x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("huber value and gradient: stated examples") {
  PenaltySpec unit{1.0, 1.0, 1.0};

  auto zero = penalty_eval(unit, Vec{0.0});
  CHECK(zero.value == 0.0);
  CHECK(zero.grad[0] == 0.0);

  auto linear = penalty_eval(unit, Vec{2.0});  // ||z|| = 2 > mu
  CHECK(linear.value == Catch::Approx(1.5).margin(1e-15));
  CHECK(linear.grad[0] == Catch::Approx(1.0).margin(1e-15));

  PenaltySpec tight{1e-3, 1.0, 1.0};
  auto quad = penalty_eval(tight, Vec{5e-4});
  CHECK(quad.value == Catch::Approx(1.25e-4).epsilon(1e-12));
  CHECK(quad.grad[0] == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("huber gradient matches central finite differences") {
  Rng rng(42);
  int tested = 0;
  while (tested < 120) {
    double mu = std::pow(10.0, -3.0 + 3.0 * rng.next_double());
    std::size_t d = 1 + rng.next_index(4);
    Vec z(d);
    double scale = std::pow(10.0, -2.0 + 3.0 * rng.next_double());
    for (auto& x : z) x = scale * rng.next_normal();
    double r = norm(z);
    if (std::abs(r - mu) < 1e-3 * std::max(mu, r)) continue;  // keep FD window off the kink
    PenaltySpec spec{mu, 1.0, 1.0};
    Vec grad = penalty_eval(spec, z).grad;
    for (std::size_t i = 0; i < d; ++i) {
      double h = 1e-6 * std::max(1.0, std::abs(z[i]));
      Vec zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      double fd = (penalty_eval(spec, zp).value - penalty_eval(spec, zm).value) / (2.0 * h);
      double denom = std::max(std::abs(grad[i]), 1e-3);
      CHECK(std::abs(fd - grad[i]) / denom < 1e-5);
    }
    ++tested;
  }
}

TEST_CASE("huber gradient norm never exceeds one, even at 1e10 inputs") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    double mu = std::pow(10.0, -3.0 + 3.0 * rng.next_double());
    std::size_t d = 1 + rng.next_index(8);
    double scale = std::pow(10.0, -5.0 + 15.0 * rng.next_double());  // up to 1e10
    Vec z(d);
    for (auto& x : z) x = scale * rng.next_normal();
    PenaltySpec spec{mu, 1.0, 1.0};
    CHECK(norm(penalty_eval(spec, z).grad) <= 1.0);
  }
}

TEST_CASE("huber value and gradient are continuous at the radius") {
  PenaltySpec spec{0.37, 1.0, 1.0};
  double r_lo = spec.mu * (1.0 - 1e-12);
  double r_hi = spec.mu * (1.0 + 1e-12);
  auto lo = penalty_eval(spec, Vec{r_lo});
  auto hi = penalty_eval(spec, Vec{r_hi});
  CHECK(std::abs(lo.value - hi.value) < 1e-9);
  CHECK(std::abs(lo.grad[0] - hi.grad[0]) < 1e-9);
}

TEST_CASE("prox: stated examples") {
  PenaltySpec unit{1.0, 1.0, 1.0};
  CHECK(penalty_prox(unit, 0.7, Vec{0.0, 0.0})[0] == 0.0);

  Vec a = penalty_prox(unit, 0.5, Vec{0.3});
  CHECK(a[0] == Catch::Approx(0.2).epsilon(1e-12));  // quadratic branch mu v/(mu+c)

  Vec b = penalty_prox(unit, 0.5, Vec{3.0});
  CHECK(b[0] == Catch::Approx(2.5).epsilon(1e-12));  // shrinkage branch (1 - c/||v||) v

  CHECK_THROWS_AS(penalty_prox(unit, 0.0, Vec{1.0}), ConfigError);
  CHECK_THROWS_AS(penalty_eval(unit, Vec{std::nan("")}), ProtocolError);
}

TEST_CASE("prox equals the numeric minimizer on 1000 random cases") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    double mu = std::pow(10.0, -3.0 + 3.5 * rng.next_double());
    double c = std::pow(10.0, -3.0 + 4.0 * rng.next_double());
    std::size_t d = 1 + rng.next_index(5);
    double scale = std::pow(10.0, -2.0 + 3.5 * rng.next_double());
    Vec v(d);
    for (auto& x : v) x = scale * rng.next_normal();
    double r = norm(v);
    PenaltySpec spec{mu, 1.0, 1.0};
    Vec closed = penalty_prox(spec, c, v);
    if (r == 0.0) {
      CHECK(norm(closed) == 0.0);
      continue;
    }
    double t_star = numeric_prox_radius(mu, c, r);
    Vec numeric = scaled(v, t_star / r);
    CHECK(norm(sub(closed, numeric)) <= 1e-8 * std::max(1.0, r));
  }
}

TEST_CASE("prox branches meet continuously at ||v|| = mu + c") {
  PenaltySpec spec{0.8, 1.0, 1.0};
  double c = 0.45;
  double boundary = spec.mu + c;
  Vec inside = penalty_prox(spec, c, Vec{boundary * (1.0 - 1e-12)});
  Vec outside = penalty_prox(spec, c, Vec{boundary * (1.0 + 1e-12)});
  CHECK(std::abs(inside[0] - outside[0]) < 1e-9);
}
