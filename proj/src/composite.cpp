#include "disco/composite.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "disco/errors.hpp"
#include "disco/localsolve.hpp"
#include "disco/losses.hpp"

namespace disco {

Vec prox_l1(const Vec& x, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("prox_l1: threshold >= 0");
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = std::fabs(x[i]) - threshold;
    y[i] = mag > 0.0 ? (x[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return y;
}

Vec project_l2_ball(const Vec& x, double radius) {
  const double nrm = norm2(x);
  if (nrm <= radius) return x;
  return scaled(x, radius / nrm);
}

double Psi::value(const Vec& w) const {
  switch (kind) {
    case Kind::L1:
      return sigma * norm1(w);
    case Kind::L2Ball:
      return norm2(w) <= radius * (1.0 + 1e-12)
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

Vec Psi::prox(const Vec& z, double step) const {
  switch (kind) {
    case Kind::L1:
      return prox_l1(z, step * sigma);
    case Kind::L2Ball:
      return project_l2_ball(z, radius);
  }
  return z;
}

Vec gradient_mapping_from_parts(const Vec& w_k, const Vec& grad, const Vec& v,
                                const Vec& hv, double L, const Psi& psi) {
  if (L <= 0.0) throw std::invalid_argument("gradient mapping: L > 0");
  // With q = f''(w_k) v - f'(w_k) and the candidate point z = w_k - v:
  //   g = z - prox_{Psi/L}(z + q/L),
  // which vanishes exactly at subproblem minimizers (q is then a Psi
  // subgradient at z) and reduces to -q/L when Psi = 0.
  Vec point = sub(w_k, v);
  Vec shifted = point;
  for (std::size_t i = 0; i < shifted.size(); ++i)
    shifted[i] += (hv[i] - grad[i]) / L;
  Vec z = psi.prox(shifted, 1.0 / L);
  return sub(point, z);
}

Vec gradient_mapping(Cluster& cluster, const Vec& w_k, const Vec& grad,
                     const Vec& v, double L, const Psi& psi) {
  const Vec hv = cluster.distributed_hessvec(w_k, v);  // one round
  return gradient_mapping_from_parts(w_k, grad, v, hv, L, psi);
}

namespace {

// Master-local solve of the preconditioned model
//   min_u (1/2)(u-s)^T (H_0 + mu I)(u-s) + <hs - grad, u-s> + Psi(w_k - u)
// by accelerated proximal gradient; L_P/m_P bound the model curvature. The
// Psi argument is oriented like the proximal-Newton subproblem itself, so the
// fixed point of the outer iteration is that subproblem's minimizer.
Vec solve_master_model(const Cluster& cluster, const Vec& w_k, const Vec& s,
                       const Vec& hs, const Vec& grad, double mu, double lambda,
                       double L, const Psi& psi, const Vec& warm, double tol) {
  const auto& master = cluster.master_shard();
  const RegularizedLoss& rl = cluster.loss();
  const auto apply = [&](const Vec& x) {
    Vec ax = local_hessvec(rl, master, w_k, x);
    axpy(mu, x, ax);
    return ax;
  };
  const double lp = L + mu;
  const double mp = lambda + mu;
  const double tau = 1.0 / lp;
  const double theta =
      (std::sqrt(lp) - std::sqrt(mp)) / (std::sqrt(lp) + std::sqrt(mp));

  Vec lin = sub(hs, grad);

  const auto pg_step = [&](const Vec& u) {
    Vec gq = apply(sub(u, s));
    axpy(1.0, lin, gq);
    Vec x = u;
    axpy(-tau, gq, x);
    // prox of step*Psi(w_k - .): u+ = w_k - prox_{step Psi}(w_k - x)
    return sub(w_k, psi.prox(sub(w_k, x), tau));
  };

  Vec u = warm;
  Vec u_prev = warm;
  Vec y = warm;
  for (int it = 0; it < 200000; ++it) {
    Vec u_next = pg_step(y);
    const double move = norm2(sub(u_next, u)) / tau;
    u_prev = std::move(u);
    u = std::move(u_next);
    y = u;
    axpy(theta, sub(u, u_prev), y);
    if (move <= tol) break;
  }
  // polish: one plain PG step from u certifies the fixed point
  return pg_step(u);
}

}  // namespace

PapgResult inner_papg(Cluster& cluster, const Vec& w_k, const Vec& grad,
                      double mu, double lambda, double L, double eps_k,
                      int iter_cap, const Psi& psi, double master_tol) {
  if (eps_k <= 0.0) throw std::invalid_argument("inner_papg: eps_k > 0");
  if (iter_cap < 1) throw std::invalid_argument("inner_papg: iter_cap >= 1");
  const double kappa = std::sqrt(1.0 + 2.0 * mu / lambda);
  const double momentum = (kappa - 1.0) / (kappa + 1.0);

  PapgResult res;
  res.v = zeros(w_k.size());
  Vec v_prev = res.v;
  Vec s = res.v;

  for (int t = 0; t <= iter_cap; ++t) {
    // One round serves both the update (Hs) and the exit test (Hv).
    auto [hs, hv] = cluster.distributed_hessvec_pair(w_k, s, res.v);
    ++res.rounds_used;
    res.delta = std::sqrt(std::max(0.0, dot(res.v, hv)));
    res.mapping_norm =
        norm2(gradient_mapping_from_parts(w_k, grad, res.v, hv, L, psi));
    if (res.mapping_norm <= eps_k) {
      res.converged = true;
      return res;
    }
    if (t == iter_cap) break;
    ++res.iters;

    Vec v_next = solve_master_model(cluster, w_k, s, hs, grad, mu, lambda, L,
                                    psi, res.v, master_tol);
    v_prev = std::move(res.v);
    res.v = std::move(v_next);
    s = res.v;
    axpy(momentum, sub(res.v, v_prev), s);
  }
  return res;
}

NewtonTrace run_disco_composite(Cluster& cluster, const SolverConfig& cfg,
                                const Psi& psi) {
  NewtonTrace trace;
  trace.algorithm = "disco-composite";
  trace.composite = true;
  const ResolvedConstants rc = resolve_constants(cluster, cfg);
  const ToleranceFn eps_fn = make_tolerance(cfg, rc.lambda, rc.L);
  const int cap = cfg.pcg_iter_cap > 0
                      ? cfg.pcg_iter_cap
                      : default_pcg_cap(rc.lambda, rc.L, cfg.beta);
  const double stop_threshold =
      (1.0 - cfg.beta) * std::sqrt(cfg.epsilon * rc.lambda);

  Vec w = cfg.init == InitMode::LocalAverage
              ? init_point(cluster, cfg.rho, cfg.init_tol)
              : zeros(cluster.dim());
  const Vec zero = zeros(cluster.dim());

  const auto push = [&](int k, std::int64_t rounds_at, double grad_norm,
                        double delta, int iters) {
    TraceRow row;
    row.k = k;
    row.rounds = rounds_at;
    row.f = cluster.objective(w);
    row.ell = row.f / cluster.loss().eta;
    row.grad_norm = grad_norm;
    row.delta = delta;
    row.pcg_iters = iters;
    row.mu = cfg.mu;
    row.F = row.f + psi.value(w);
    row.l1 = norm1(w);
    trace.rows.push_back(row);
    if (cfg.record_iterates) trace.iterates.push_back(w);
  };

  trace.status = RunStatus::MaxOuterExceeded;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const Vec grad = cluster.distributed_grad(w);
    const double gnorm = norm2(grad);

    const Vec g0 = gradient_mapping_from_parts(w, grad, zero, zero, rc.L, psi);
    if (norm2(g0) <= stop_threshold) {
      trace.status = RunStatus::Converged;
      push(k, cluster.rounds(), gnorm, 0.0, 0);
      trace.w_final = w;
      return trace;
    }

    const PapgResult inner = inner_papg(cluster, w, grad, cfg.mu, rc.lambda,
                                        rc.L, eps_fn(gnorm), cap, psi,
                                        cfg.precond_tol);
    push(k, rounds_at, gnorm, inner.delta, inner.iters);
    w = damped_newton_update(w, inner.v, inner.delta);
    if (cfg.max_rounds > 0 && cluster.rounds() >= cfg.max_rounds) {
      trace.status = RunStatus::MaxRoundsExceeded;
      break;
    }
  }
  push(static_cast<int>(trace.rows.size()), cluster.rounds(),
       norm2(cluster.pooled_grad(w)), 0.0, 0);
  trace.w_final = w;
  return trace;
}

Vec centralized_composite_minimizer(const Cluster& cluster, const Psi& psi,
                                    double mapping_tol, int max_iter) {
  const SmoothnessConstants c = smoothness_constants(cluster.loss());
  const double tau = 1.0 / c.L;
  const double q = std::sqrt(c.lambda / c.L);
  const double momentum = (1.0 - q) / (1.0 + q);

  const auto pg_step = [&](const Vec& u) {
    Vec z = u;
    axpy(-tau, cluster.pooled_grad(u), z);
    return psi.prox(z, tau);
  };

  Vec w = zeros(cluster.dim());
  Vec w_prev = w;
  Vec y = w;
  for (int it = 0; it < max_iter; ++it) {
    Vec w_next = pg_step(y);
    const double move = norm2(sub(w_next, pg_step(w_next))) / tau;
    w_prev = std::move(w);
    w = std::move(w_next);
    y = w;
    axpy(momentum, sub(w, w_prev), y);
    if (move <= mapping_tol) return w;
  }
  throw SolveError("composite reference solve missed its tolerance", w);
}

}  // namespace disco
