#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "disco/errors.hpp"
#include "disco/losses.hpp"
#include "support/oracles.hpp"

using namespace disco;

namespace {

DatasetShard single_row_shard(std::vector<Feature> features, double label, int dim) {
  DatasetShard s;
  s.dim = dim;
  s.examples.push_back({std::move(features), label});
  return s;
}

DatasetShard random_shard(int n, int d, std::uint64_t seed) {
  Dataset data = synth_classification(n, d, seed, 0.2);
  auto shards = shard(data, 1, seed);
  return shards.front();
}

}  // namespace

TEST_CASE("logistic scalar derivatives") {
  Loss lg{LossKind::Logistic, 0.0};
  const auto at0 = scalar_derivs(lg, 0.0);
  CHECK(at0.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(at0.d1 == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(at0.d2 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(at0.d3 == doctest::Approx(0.0));

  // overflow-safe far in both tails
  const auto pos = scalar_derivs(lg, 800.0);
  CHECK(std::isfinite(pos.value));
  CHECK(pos.value == doctest::Approx(0.0));
  const auto neg = scalar_derivs(lg, -800.0);
  CHECK(std::isfinite(neg.value));
  CHECK(neg.value == doctest::Approx(800.0).epsilon(1e-12));
  CHECK(neg.d1 == doctest::Approx(-1.0).epsilon(1e-12));

  // |phi'''| <= phi'' pointwise
  for (int i = 0; i <= 10000; ++i) {
    const double t = -50.0 + 100.0 * i / 10000.0;
    const auto s = scalar_derivs(lg, t);
    CHECK(std::fabs(s.d3) <= s.d2 + 1e-18);
  }
}

TEST_CASE("smoothed hinge branches and breakpoints") {
  Loss h3{LossKind::SmoothedHinge, 3.0};
  const auto flat = scalar_derivs(h3, 2.5);
  CHECK(flat.value == 0.0);
  CHECK(flat.d1 == 0.0);
  CHECK(flat.d2 == 0.0);
  CHECK(flat.d3 == 0.0);

  // p=3 at t=1: both adjacent branches give 1/6
  const auto at1 = scalar_derivs(h3, 1.0);
  CHECK(at1.value == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  // C^2 at every breakpoint for the p grid
  for (double p : {3.0, 5.0, 10.0, 20.0}) {
    Loss hp{LossKind::SmoothedHinge, p};
    const double a = (p - 3.0) / (p - 1.0);
    for (double bp : {-a, 1.0 - a, 1.0, 2.0}) {
      const double eps = 1e-9;
      const auto lo = scalar_derivs(hp, bp - eps);
      const auto hi = scalar_derivs(hp, bp + eps);
      CHECK(std::fabs(lo.value - hi.value) < 1e-8);
      CHECK(std::fabs(lo.d1 - hi.d1) < 1e-7);
      CHECK(std::fabs(lo.d2 - hi.d2) < 1e-6);
    }

    // self-concordance inequality |phi'''| <= (p-2) (phi'')^{1-1/(p-2)},
    // convexity, and monotone decrease left of t = 2
    for (int i = 0; i <= 10000; ++i) {
      const double t = -4.0 + 8.0 * i / 10000.0;
      const auto s = scalar_derivs(hp, t);
      CHECK(s.d2 >= 0.0);
      if (t < 2.0) CHECK(s.d1 <= 1e-15);
      const double bound = (p - 2.0) * std::pow(s.d2, 1.0 - 1.0 / (p - 2.0));
      CHECK(std::fabs(s.d3) <= bound + 1e-12);
    }
  }

  CHECK_THROWS_AS(scalar_derivs(Loss{LossKind::SmoothedHinge, 2.5}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("quadratic scalar derivatives have zero third derivative") {
  Loss q{LossKind::Quadratic, 0.0};
  for (double t : {-3.0, 0.0, 0.7, 100.0}) {
    const auto s = scalar_derivs(q, t);
    CHECK(s.value == t * t);
    CHECK(s.d1 == 2.0 * t);
    CHECK(s.d2 == 2.0);
    CHECK(s.d3 == 0.0);
  }
}

TEST_CASE("local_value basics") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Logistic, 0.0};
  rl.gamma = 0.5;
  rl.eta = 1.0;
  const DatasetShard s = random_shard(20, 4, 3);
  const Vec w0 = zeros(4);
  CHECK(local_value(rl, s, w0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  RegularizedLoss q = rl;
  q.loss = {LossKind::Quadratic, 0.0};
  double ymean = 0.0;
  for (const Example& ex : s.examples) ymean += ex.label * ex.label;
  ymean /= s.size();
  CHECK(local_value(q, s, w0) == doctest::Approx(ymean).epsilon(1e-14));

  // eta is a literal multiplier
  RegularizedLoss twice = rl;
  twice.eta = 2.0;
  Vec w(4, 0.3);
  CHECK(local_value(twice, s, w) ==
        doctest::Approx(2.0 * local_value(rl, s, w)).epsilon(1e-15));

  CHECK_THROWS_AS(local_value(rl, s, zeros(5)), DimensionError);
}

TEST_CASE("quadratic gradient on a single row") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Quadratic, 0.0};
  rl.gamma = 1e-12;
  rl.eta = 1.0;
  const DatasetShard s = single_row_shard({{0, 1.0}}, 1.0, 2);
  const Vec g = local_grad(rl, s, zeros(2));
  CHECK(g[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(g[1] == 0.0);

  RegularizedLoss scaled = rl;
  scaled.eta = 3.0;
  CHECK(local_grad(scaled, s, zeros(2))[0] == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("gradient and hessvec match finite differences") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    RegularizedLoss rl;
    const int pick = trial % 3;
    rl.loss = pick == 0   ? Loss{LossKind::Quadratic, 0.0}
              : pick == 1 ? Loss{LossKind::Logistic, 0.0}
                          : Loss{LossKind::SmoothedHinge, 3.0 + (trial % 5)};
    rl.gamma = 0.05 + 0.1 * rng.uniform();
    rl.eta = trial % 4 == 0 ? 2.5 : 1.0;
    const int d = 3 + trial % 4;
    const DatasetShard s = random_shard(12, d, 1000 + trial);

    Vec w(d), v(d);
    for (int i = 0; i < d; ++i) {
      w[i] = rng.normal();
      v[i] = rng.normal();
    }

    const Vec g = local_grad(rl, s, w);
    CHECK(oracles::rel_err(g, oracles::fd_grad(rl, s, w)) < 1e-6);

    const Vec hv = local_hessvec(rl, s, w, v);
    CHECK(oracles::rel_err(hv, oracles::fd_hessvec(rl, s, w, v)) < 1e-5);
  }
}

TEST_CASE("hessvec on a single quadratic row is 2 x x^T v") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Quadratic, 0.0};
  rl.gamma = 1e-300;  // effectively zero regularizer
  rl.eta = 1.0;
  const DatasetShard s = single_row_shard({{0, 1.0}}, 1.0, 2);
  Vec v{0.7, -0.3};
  const Vec hv = local_hessvec(rl, s, zeros(2), v);
  CHECK(hv[0] == doctest::Approx(2.0 * 0.7).epsilon(1e-12));
  CHECK(hv[1] == doctest::Approx(0.0));

  CHECK(norm2(local_hessvec(rl, s, zeros(2), zeros(2))) == 0.0);
}

TEST_CASE("gradient vanishes at the ridge normal-equations solution") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Quadratic, 0.0};
  rl.gamma = 0.1;
  rl.eta = 1.0;
  const DatasetShard s = random_shard(30, 6, 5);
  const Vec wstar = oracles::ridge_normal_equations(rl, s, 0.0);
  CHECK(norm2(local_grad(rl, s, wstar)) < 1e-10);
}

TEST_CASE("self-concordance parameter and standard scaling") {
  CHECK(self_concordance_parameter({LossKind::Logistic, 0.0}, 1.0, 1.0) == 1.0);
  CHECK(self_concordance_parameter({LossKind::SmoothedHinge, 4.0}, 1.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(self_concordance_parameter({LossKind::Quadratic, 0.0}, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(self_concordance_parameter({LossKind::Logistic, 0.0}, 1.0, 0.0),
                  std::domain_error);

  CHECK(standard_scaling(2.0) == 1.0);
  CHECK(standard_scaling(0.0) == 1.0);
  // logistic with B=1, gamma=1e-5: eta = B^2/(4 gamma) = 25000
  const double m = self_concordance_parameter({LossKind::Logistic, 0.0}, 1.0, 1e-5);
  CHECK(standard_scaling(m) == doctest::Approx(25000.0).epsilon(1e-12));
}

TEST_CASE("smoothness constants per kind") {
  const auto lg = smoothness_constants({LossKind::Logistic, 0.0}, 1.0, 1.0, 1.0);
  CHECK(lg.L == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(lg.lambda == doctest::Approx(1.0));
  CHECK(lg.V0 == doctest::Approx(std::log(2.0)));
  CHECK(lg.G == doctest::Approx(1.0));
  CHECK(lg.M == doctest::Approx(0.1));

  const auto sh = smoothness_constants({LossKind::SmoothedHinge, 5.0}, 1.0, 1.0, 1.0);
  CHECK(sh.L == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sh.M == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(sh.V0 == doctest::Approx(1.0));

  const auto q = smoothness_constants({LossKind::Quadratic, 0.0}, 1.0, 1.0, 1.0, 1.0);
  CHECK(q.M == 0.0);
  CHECK(q.V0 == doctest::Approx(1.0));
  CHECK(q.L == doctest::Approx(3.0));
  CHECK(q.lambda == doctest::Approx(1.0));
}

TEST_CASE("scaling contract: grad and hessvec scale exactly with eta") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Logistic, 0.0};
  rl.gamma = 0.01;
  rl.eta = 1.0;
  const DatasetShard s = random_shard(15, 5, 11);
  Rng rng(4);
  Vec w(5), v(5);
  for (int i = 0; i < 5; ++i) {
    w[i] = rng.normal();
    v[i] = rng.normal();
  }
  RegularizedLoss scaled = rl;
  scaled.eta = 7.0;
  const Vec g1 = local_grad(rl, s, w);
  const Vec g7 = local_grad(scaled, s, w);
  const Vec h1 = local_hessvec(rl, s, w, v);
  const Vec h7 = local_hessvec(scaled, s, w, v);
  for (int i = 0; i < 5; ++i) {
    CHECK(g7[i] == 7.0 * g1[i]);  // exact: eta is a literal multiplier
    CHECK(h7[i] == 7.0 * h1[i]);
  }
}
