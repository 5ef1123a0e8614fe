#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disco/composite.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace disco;

namespace {

// Coordinate-descent oracle for min_z (1/2)(w-z)' H (w-z) - (w-z)' g + sigma|z|_1,
// i.e. the prox-Newton subproblem in the variable z = w - v. Independent of
// the library's solvers.
Vec lasso_subproblem_cd(const Eigen::MatrixXd& H, const Vec& w, const Vec& g,
                        double sigma, int sweeps = 200000, double tol = 1e-13) {
  const int d = static_cast<int>(w.size());
  Eigen::VectorXd z = oracles::to_eigen(w);
  const Eigen::VectorXd b =
      H * oracles::to_eigen(w) - oracles::to_eigen(g);  // linear term of z
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double biggest = 0.0;
    for (int j = 0; j < d; ++j) {
      const double old = z(j);
      const double rho = b(j) - (H.row(j) * z - H(j, j) * old);
      const double soft = std::fabs(rho) - sigma;
      const double next = soft > 0.0 ? (rho > 0 ? soft : -soft) / H(j, j) : 0.0;
      z(j) = next;
      biggest = std::max(biggest, std::fabs(next - old));
    }
    if (biggest < tol) break;
  }
  // return v = w - z
  Vec v(w.size());
  for (int j = 0; j < d; ++j) v[j] = w[j] - z(j);
  return v;
}

}  // namespace

TEST_CASE("prox_l1") {
  const Vec x{2.0, -0.5};
  const Vec y = prox_l1(x, 1.0);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.0);
  CHECK(prox_l1(x, 0.0) == x);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    Vec z{rng.normal() * 3, rng.normal() * 3, rng.normal() * 3};
    CHECK(norm_inf(prox_l1(z, 0.7)) <= norm_inf(z) + 1e-15);
  }
}

TEST_CASE("project_l2_ball") {
  const Vec inside{0.3, 0.4};
  CHECK(project_l2_ball(inside, 1.0) == inside);
  const Vec out = project_l2_ball(Vec{3.0, 4.0}, 1.0);
  CHECK(norm2(out) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[0] == doctest::Approx(0.6));
}

TEST_CASE("gradient mapping: sigma = 0 reduces to the scaled residual") {
  Cluster cl = fixtures::ridge_cluster(40, 5, 2, 3, 0.1);
  Rng rng(2);
  Vec w(5), v(5);
  for (int i = 0; i < 5; ++i) {
    w[i] = rng.normal();
    v[i] = rng.normal();
  }
  const Vec grad = cl.pooled_grad(w);
  const double L = smoothness_constants(cl.loss()).L;
  Psi psi;  // sigma = 0
  const std::int64_t before = cl.rounds();
  const Vec g = gradient_mapping(cl, w, grad, v, L, psi);
  CHECK(cl.rounds() == before + 1);  // one Hessian-vector round

  const Vec hv = cl.pooled_hessvec(w, v);
  for (int i = 0; i < 5; ++i)
    CHECK(g[i] == doctest::Approx(-(hv[i] - grad[i]) / L).epsilon(1e-12));
}

TEST_CASE("gradient mapping vanishes exactly at the subproblem minimizer") {
  Cluster cl = fixtures::ridge_cluster(60, 6, 2, 7, 0.2);
  Rng rng(5);
  Vec w(6);
  for (double& wi : w) wi = rng.normal();
  const Vec grad = cl.pooled_grad(w);
  const Eigen::MatrixXd H = oracles::dense_hessian(cl, w);
  const double sigma = 0.05;
  const Vec vstar = lasso_subproblem_cd(H, w, grad, sigma);

  Psi psi;
  psi.sigma = sigma;
  const double L = smoothness_constants(cl.loss()).L;
  const Vec hv = cl.pooled_hessvec(w, vstar);
  const Vec g = gradient_mapping_from_parts(w, grad, vstar, hv, L, psi);
  CHECK(norm2(g) <= 1e-8);

  // and a non-minimizer has a visibly nonzero mapping
  Vec off = vstar;
  off[0] += 0.1;
  const Vec hoff = cl.pooled_hessvec(w, off);
  CHECK(norm2(gradient_mapping_from_parts(w, grad, off, hoff, L, psi)) > 1e-4);
}

TEST_CASE("inner_papg: exact preconditioner and sigma=0 exits immediately") {
  RegularizedLoss rl;
  rl.loss = {LossKind::Quadratic, 0.0};
  rl.gamma = 0.1;
  Cluster cl = fixtures::identical_shards_cluster(40, 5, 3, 11, rl);
  Rng rng(7);
  Vec w(5);
  for (double& wi : w) wi = rng.normal();
  const Vec grad = cl.pooled_grad(w);
  const auto c = smoothness_constants(cl.loss());
  Psi psi;
  const PapgResult res =
      inner_papg(cl, w, grad, 0.0, c.lambda, c.L, 1e-8, 50, psi);
  CHECK(res.converged);
  CHECK(res.iters <= 2);

  // the momentum coefficient at mu = 0 is zero by the formula
  CHECK((std::sqrt(1.0) - 1.0) / (std::sqrt(1.0) + 1.0) == 0.0);
}

TEST_CASE("inner_papg solves a small lasso subproblem to oracle accuracy") {
  Cluster cl = fixtures::logistic_cluster(100, 5, 2, 13, 0.05);
  Rng rng(9);
  Vec w(5);
  for (double& wi : w) wi = rng.normal();
  const Vec grad = cl.pooled_grad(w);
  const auto c = smoothness_constants(cl.loss());
  Psi psi;
  psi.sigma = 0.1;

  // the scheme assumes mu >= ||H_0 - H||; measure it
  const double mu = 1.2 * cl.hessian_similarity(w, 100);
  const PapgResult res =
      inner_papg(cl, w, grad, mu, c.lambda, c.L, 1e-9, 500, psi);
  REQUIRE(res.converged);

  const Eigen::MatrixXd H = oracles::dense_hessian(cl, w);
  const Vec vstar = lasso_subproblem_cd(H, w, grad, psi.sigma);
  CHECK(oracles::rel_err(res.v, vstar) < 1e-6);
}

TEST_CASE("run_disco_composite: sigma=0 matches smooth DiSCO per iterate") {
  SolverConfig cfg;
  cfg.tolerance_mode = ToleranceMode::Practical;
  cfg.practical_c = 1e-8;  // tight inner solves so both paths agree closely
  cfg.epsilon = 1e-10;
  cfg.mu = 0.0;
  cfg.init = InitMode::Zero;
  cfg.record_iterates = true;

  Cluster a = fixtures::ridge_cluster(60, 6, 2, 17, 0.3);
  Psi psi;  // sigma = 0
  NewtonTrace comp = run_disco_composite(a, cfg, psi);
  Cluster b = fixtures::ridge_cluster(60, 6, 2, 17, 0.3);
  NewtonTrace smooth = run_disco(b, cfg);

  REQUIRE(comp.status == RunStatus::Converged);
  REQUIRE(smooth.status == RunStatus::Converged);
  const std::size_t n = std::min(comp.iterates.size(), smooth.iterates.size());
  REQUIRE(n >= 2);
  for (std::size_t i = 0; i < n; ++i) {
    CAPTURE(i);
    CHECK(norm2(sub(comp.iterates[i], smooth.iterates[i])) < 1e-6);
  }
}

TEST_CASE("run_disco_composite: large sigma collapses to zero") {
  Cluster cl = fixtures::logistic_cluster(80, 6, 2, 19, 0.05);
  const Vec g0 = cl.pooled_grad(zeros(6));
  Psi psi;
  psi.sigma = 2.0 * norm_inf(g0);  // sigma >= |f'(0)|_inf makes 0 optimal

  SolverConfig cfg;
  cfg.epsilon = 1e-10;
  cfg.init = InitMode::Zero;
  cfg.record_iterates = true;
  NewtonTrace trace = run_disco_composite(cl, cfg, psi);
  REQUIRE(trace.status == RunStatus::Converged);
  CHECK(norm2(trace.w_final) == 0.0);
  // support identification: all iterates after the first stay in supp(w*) = {}
  for (std::size_t i = 1; i < trace.iterates.size(); ++i)
    CHECK(norm2(trace.iterates[i]) == 0.0);
}

TEST_CASE("run_disco_composite reaches the composite reference on a lasso") {
  const double sigma = 0.02;
  Psi psi;
  psi.sigma = sigma;

  Cluster cl = fixtures::logistic_cluster(100, 5, 2, 23, 0.05);
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.init = InitMode::Zero;
  cfg.mu = 1.2 * cl.hessian_similarity(zeros(5), 100);
  NewtonTrace trace = run_disco_composite(cl, cfg, psi);
  REQUIRE(trace.status == RunStatus::Converged);

  Cluster ref = fixtures::logistic_cluster(100, 5, 2, 23, 0.05);
  const Vec wstar = centralized_composite_minimizer(ref, psi, 1e-12);
  const double Fstar = ref.objective(wstar) + psi.value(wstar);
  const double Fhat = ref.objective(trace.w_final) + psi.value(trace.w_final);
  CHECK(Fhat - Fstar <= cfg.epsilon);

  // F nonincreasing along the trace
  for (std::size_t i = 1; i < trace.rows.size(); ++i)
    CHECK(trace.rows[i].F <= trace.rows[i - 1].F + 1e-8);

  // composite CSV carries the two extra columns
  const std::string csv = trace.to_csv();
  CHECK(csv.rfind("k,rounds,f,ell_gap,grad_norm,delta,pcg_iters,mu,F_gap,l1\n",
                  0) == 0);
}
