#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disco/pcg.hpp"
#include "disco/solvers.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace disco;

namespace {

Vec random_point(int d, std::uint64_t seed) {
  Rng rng(seed);
  Vec w(d);
  for (double& wi : w) wi = rng.normal();
  return w;
}

}  // namespace

TEST_CASE("perfectly preconditioned system converges in one iteration") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Logistic, 0.0};
  rl.gamma = 0.01;
  Cluster cl = fixtures::identical_shards_cluster(40, 6, 3, 2, rl);
  const Vec w = random_point(6, 3);
  const PcgResult res = distributed_pcg(cl, w, 0.0, 1e-10, 50);
  CHECK(res.converged);
  CHECK(res.iters == 1);
  CHECK(res.residual_norm <= 1e-10);
  CHECK(res.rounds_used == res.iters + 1);
}

TEST_CASE("pcg solution matches the dense Newton system solve") {
  Cluster cl = fixtures::logistic_cluster(64, 8, 4, 5, 0.02);
  const Vec w = random_point(8, 7);
  const double eps_k = 1e-9;
  const PcgResult res = distributed_pcg(cl, w, 0.01, eps_k, 200);
  REQUIRE(res.converged);

  // residual definition check against dense H and f'
  Eigen::MatrixXd H = oracles::dense_hessian(cl, w);
  const Vec g = cl.pooled_grad(w);
  Eigen::VectorXd resid = H * oracles::to_eigen(res.v) - oracles::to_eigen(g);
  CHECK(resid.norm() <= eps_k * (1.0 + 1e-6));
  CHECK(res.residual_norm == doctest::Approx(resid.norm()).epsilon(1e-6));

  const Vec exact = oracles::dense_solve(H, g);
  CHECK(oracles::rel_err(res.v, exact) < 1e-6);
}

TEST_CASE("round accounting is iters + 1 and delta matches recomputation") {
  Cluster cl = fixtures::logistic_cluster(48, 6, 3, 11, 0.05);
  const Vec w = random_point(6, 13);
  const std::int64_t before = cl.rounds();
  const PcgResult res = distributed_pcg(cl, w, 0.02, 1e-8, 100);
  REQUIRE(res.converged);
  CHECK(cl.rounds() - before == res.rounds_used);
  CHECK(res.rounds_used == res.iters + 1);

  // diagnostic recomputation of delta = sqrt(v^T H v)
  const Vec hv = cl.pooled_hessvec(w, res.v);
  CHECK(res.delta == doctest::Approx(std::sqrt(dot(res.v, hv))).epsilon(1e-8));
}

TEST_CASE("maintained residual equals the recomputed one at every iteration") {
  Cluster cl = fixtures::ridge_cluster(60, 7, 3, 17, 0.05);
  const Vec w = random_point(7, 19);
  PcgDiagnostics diag;
  const PcgResult res = distributed_pcg(cl, w, 0.01, 1e-10, 100, 1e-12, &diag);
  REQUIRE(res.converged);
  REQUIRE(diag.iterates.size() == static_cast<std::size_t>(res.iters));

  Eigen::MatrixXd H = oracles::dense_hessian(cl, w);
  const Eigen::VectorXd g = oracles::to_eigen(cl.pooled_grad(w));
  for (std::size_t t = 0; t < diag.iterates.size(); ++t) {
    const Eigen::VectorXd true_r = g - H * oracles::to_eigen(diag.iterates[t]);
    const Eigen::VectorXd kept_r = oracles::to_eigen(diag.residuals[t]);
    CHECK((true_r - kept_r).norm() <= 1e-8 * std::max(1.0, true_r.norm()));
  }
}

TEST_CASE("H-norm error is monotonically nonincreasing") {
  Cluster cl = fixtures::logistic_cluster(64, 10, 4, 23, 0.01);
  const Vec w = random_point(10, 29);
  PcgDiagnostics diag;
  const PcgResult res = distributed_pcg(cl, w, 0.05, 1e-10, 200, 1e-12, &diag);
  REQUIRE(res.converged);

  Eigen::MatrixXd H = oracles::dense_hessian(cl, w);
  const Eigen::VectorXd vstar =
      H.ldlt().solve(oracles::to_eigen(cl.pooled_grad(w)));
  double prev = std::numeric_limits<double>::infinity();
  for (const Vec& vt : diag.iterates) {
    const Eigen::VectorXd err = oracles::to_eigen(vt) - vstar;
    const double hnorm = err.dot(H * err);
    CHECK(hnorm <= prev * (1.0 + 1e-9));
    prev = hnorm;
  }
}

TEST_CASE("Lemma 4.2: iterations within T_mu when mu covers ||H0 - H||") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Cluster cl = fixtures::logistic_cluster(48, 8, 2, seed, 1e-3);
    const Vec w = random_point(8, seed + 100);
    const double mu = 1.05 * cl.hessian_similarity(w, 200);
    const SmoothnessConstants c = smoothness_constants(cl.loss());
    const double beta = 1.0 / 20.0;
    const int cap = t_mu(c.lambda, c.L, mu, beta);

    const ToleranceFn eps_fn = [&](double g) {
      return epsilon_k(g, c.lambda, c.L, beta);
    };
    const PcgResult res = distributed_pcg(cl, w, mu, eps_fn, cap + 50);
    CHECK(res.converged);
    CHECK(res.iters <= cap);
  }
}

TEST_CASE("t_mu values") {
  CHECK(t_mu(1.0, 1.0, 0.0, 1.0 / 20.0) == 4);  // ceil(ln 40)
  CHECK(t_mu(1.0, 100.0, 4.0, 1.0 / 20.0) == 25);

  int prev = 0;
  for (double mu : {0.0, 0.5, 1.0, 2.0, 8.0}) {
    const int t = t_mu(1.0, 1.0, mu, 1.0 / 20.0);
    CHECK(t >= prev);
    prev = t;
  }
  CHECK(t_mu(1.0, 1.0, 0.0, 1.0 / 20.0) <= t_mu(1.0, 2.0, 0.0, 1.0 / 20.0));

  // the general bound reduces to t_mu for the linear tolerance
  const double lambda = 0.3, L = 7.0, beta = 1.0 / 20.0, g = 3.21;
  const double eps = epsilon_k(g, lambda, L, beta);
  CHECK(t_mu_general(lambda, L, 1.7, g, eps) == t_mu(lambda, L, 1.7, beta));
}

TEST_CASE("pcg returns a structured partial result at the cap") {
  Cluster cl = fixtures::logistic_cluster(64, 12, 4, 31, 1e-4);
  const Vec w = random_point(12, 37);
  const PcgResult res = distributed_pcg(cl, w, 0.0, 1e-14, 2);
  CHECK_FALSE(res.converged);
  CHECK(res.iters == 2);
  CHECK(res.rounds_used == 3);
  CHECK(res.residual_norm > 1e-14);
  CHECK(res.v.size() == 12);  // partial iterate available to the caller
}

TEST_CASE("precond_spectrum_check") {
  SUBCASE("identical shards, mu = 0: spectrum is exactly 1") {
    RegularizedLoss rl;
    rl.loss = {LossKind::Logistic, 0.0};
    rl.gamma = 0.01;
    Cluster cl = fixtures::identical_shards_cluster(30, 5, 3, 41, rl);
    const auto [lo, hi] = precond_spectrum_check(cl, random_point(5, 43), 0.0);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("identical shards, mu = lambda: sigma_min >= 1/3") {
    RegularizedLoss rl;
    rl.loss = {LossKind::Quadratic, 0.0};
    rl.gamma = 0.5;
    Cluster cl = fixtures::identical_shards_cluster(30, 5, 2, 47, rl);
    const double lambda = smoothness_constants(cl.loss()).lambda;
    const auto [lo, hi] = precond_spectrum_check(cl, zeros(5), lambda);
    CHECK(hi <= 1.0 + 1e-9);
    CHECK(lo >= 1.0 / 3.0 - 1e-9);
  }

  SUBCASE("random two-shard ridge with measured mu satisfies Lemma 4.1") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      Cluster cl = fixtures::ridge_cluster(40, 6, 2, seed, 0.05);
      const Vec w = random_point(6, seed);
      Eigen::MatrixXd h0 = oracles::dense_local_hessian(cl.loss(), cl.shard(0), w);
      Eigen::MatrixXd h = oracles::dense_hessian(cl, w);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0 - h);
      const double mu = es.eigenvalues().cwiseAbs().maxCoeff();
      const double lambda = smoothness_constants(cl.loss()).lambda;

      const auto [lo, hi] = precond_spectrum_check(cl, w, mu);
      CHECK(hi <= 1.0 + 1e-9);
      CHECK(lo >= lambda / (lambda + 2.0 * mu) - 1e-9);
    }
  }

  SUBCASE("dense path refuses large dims") {
    Cluster cl = fixtures::ridge_cluster(80, 60, 2, 1, 0.1);
    CHECK_THROWS_AS(precond_spectrum_check(cl, zeros(60), 0.1),
                    std::invalid_argument);
  }
}
