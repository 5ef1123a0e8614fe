#include "disco/pcg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "disco/localsolve.hpp"

namespace disco {

PcgResult distributed_pcg(Cluster& cluster, const Vec& w_k, double mu,
                          const ToleranceFn& eps_fn, const CapFn& cap_fn,
                          double precond_tol, PcgDiagnostics* diag) {
  PcgResult res;
  res.grad = cluster.distributed_grad(w_k);  // round 1
  res.grad_norm = norm2(res.grad);
  res.eps_k = eps_fn(res.grad_norm);
  res.rounds_used = 1;
  res.v = zeros(w_k.size());
  res.residual_norm = res.grad_norm;
  if (res.grad_norm <= res.eps_k) {
    res.converged = true;
    return res;
  }
  const int iter_cap = cap_fn(res.grad_norm, res.eps_k);
  if (iter_cap < 1) throw std::invalid_argument("iter_cap >= 1 required");

  const auto precond = [&](const Vec& r) {
    return apply_preconditioner_inverse(cluster.master_shard(), cluster.loss(),
                                        w_k, mu, r, precond_tol);
  };

  Vec r = res.grad;        // r^(0) = f'(w_k), since v^(0) = 0
  Vec s = precond(r);      // s^(0) = P^{-1} r^(0)
  Vec u = s;               // u^(0) = s^(0)
  double rs = dot(r, s);

  for (int t = 0; t < iter_cap; ++t) {
    auto [hu, hv] = cluster.distributed_hessvec_pair(w_k, u, res.v);  // one round
    ++res.rounds_used;
    ++res.iters;

    const double uhu = dot(u, hu);
    if (uhu <= 1e-300) break;  // breakdown: only at numerical convergence (H > 0)
    const double alpha = rs / uhu;

    axpy(alpha, u, res.v);       // v^(t+1)
    axpy(-alpha, hu, r);         // r^(t+1) = r^(t) - alpha H u^(t)

    // delta_k without an extra round: v^T H v = v.(H v_old) + alpha v.(H u)
    res.delta = std::sqrt(std::max(0.0, dot(res.v, hv) + alpha * dot(res.v, hu)));
    res.residual_norm = norm2(r);

    if (diag) {
      diag->iterates.push_back(res.v);
      diag->residuals.push_back(r);
      diag->alphas.push_back(alpha);
    }

    if (res.residual_norm <= res.eps_k) {
      res.converged = true;
      break;
    }
    if (t + 1 >= iter_cap) break;  // cap reached; hand back the partial result

    Vec s_next = precond(r);
    const double rs_next = dot(r, s_next);
    const double beta_t = rs_next / rs;
    rs = rs_next;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = s_next[i] + beta_t * u[i];
    s = std::move(s_next);
  }
  return res;
}

PcgResult distributed_pcg(Cluster& cluster, const Vec& w_k, double mu,
                          const ToleranceFn& eps_fn, int iter_cap,
                          double precond_tol, PcgDiagnostics* diag) {
  return distributed_pcg(
      cluster, w_k, mu, eps_fn, [iter_cap](double, double) { return iter_cap; },
      precond_tol, diag);
}

PcgResult distributed_pcg(Cluster& cluster, const Vec& w_k, double mu,
                          double eps_k, int iter_cap, double precond_tol,
                          PcgDiagnostics* diag) {
  if (eps_k <= 0.0) throw std::invalid_argument("eps_k > 0 required");
  return distributed_pcg(
      cluster, w_k, mu, [eps_k](double) { return eps_k; }, iter_cap,
      precond_tol, diag);
}

int t_mu(double lambda, double L, double mu, double beta) {
  if (lambda <= 0.0 || L < lambda || mu < 0.0 || beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("t_mu: bad arguments");
  const double bound =
      std::sqrt(1.0 + 2.0 * mu / lambda) * std::log(2.0 * L / (beta * lambda));
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

int t_mu_general(double lambda, double L, double mu, double grad_norm,
                 double eps_k) {
  if (lambda <= 0.0 || L < lambda || mu < 0.0 || eps_k <= 0.0)
    throw std::invalid_argument("t_mu_general: bad arguments");
  const double bound = std::sqrt(1.0 + 2.0 * mu / lambda) *
                       std::log(2.0 * std::sqrt(L / lambda) * grad_norm / eps_k);
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

int default_pcg_cap(double lambda, double L, double beta) {
  const double bound = std::sqrt(2.0 + 2.0 * L / lambda) *
                       std::log(2.0 * L / (beta * lambda));
  return static_cast<int>(std::ceil(bound)) + 5;
}

std::pair<double, double> precond_spectrum_check(const Cluster& cluster,
                                                 const Vec& w, double mu) {
  const int d = cluster.dim();
  if (d > 50)
    throw std::invalid_argument("precond_spectrum_check: dense path needs dim <= 50");

  Eigen::MatrixXd H(d, d), P(d, d);
  for (int j = 0; j < d; ++j) {
    Vec e = zeros(d);
    e[j] = 1.0;
    const Vec hj = cluster.pooled_hessvec(w, e);
    const Vec pj = local_hessvec(cluster.loss(), cluster.master_shard(), w, e);
    for (int i = 0; i < d; ++i) {
      H(i, j) = hj[i];
      P(i, j) = pj[i];
    }
    P(j, j) += mu;
  }
  // eigenvalues of P^{-1} H = eigenvalues of P^{-1/2} H P^{-1/2}
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, P,
                                                               Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace disco
