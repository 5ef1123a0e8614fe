#include "disco/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "disco/detail/cg.hpp"
#include "disco/errors.hpp"
#include "disco/localsolve.hpp"

namespace disco {

double omega(double t) {
  if (t < 0.0) throw std::domain_error("omega: t >= 0 required");
  return t - std::log1p(t);
}

double omega_star(double t) {
  if (t < 0.0 || t >= 1.0) throw std::domain_error("omega_star: 0 <= t < 1 required");
  return -t - std::log1p(-t);
}

double epsilon_k(double grad_norm, double lambda, double L, double beta) {
  if (lambda <= 0.0 || L < lambda || beta <= 0.0)
    throw std::invalid_argument("epsilon_k: bad arguments");
  return beta * std::sqrt(lambda / L) * grad_norm;
}

double epsilon_k_superlinear(double grad_norm, double lambda, double L) {
  if (lambda <= 0.0 || L < lambda)
    throw std::invalid_argument("epsilon_k_superlinear: bad arguments");
  const double r = grad_norm / std::sqrt(L);
  const double w = omega(r);
  return 0.5 * std::sqrt(lambda) * std::min(0.5 * w, std::pow(w, 1.5) / 10.0);
}

Vec damped_newton_update(const Vec& w, const Vec& v, double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta >= 0 required");
  Vec next = w;
  axpy(-1.0 / (1.0 + delta), v, next);
  return next;
}

bool stop_check(double delta, double beta, double epsilon) {
  return delta <= (1.0 - beta) * std::sqrt(epsilon);
}

namespace {

std::int64_t ceil_nonneg(double t) {
  if (t <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(t));
}

constexpr double kSelfConcordantStopLimit = 0.68 * 0.68;

}  // namespace

std::int64_t iteration_bound_K(double f0_gap, double epsilon) {
  if (f0_gap < 0.0 || epsilon <= 0.0)
    throw std::invalid_argument("iteration_bound_K: bad arguments");
  const double w6 = omega(1.0 / 6.0);
  return ceil_nonneg(f0_gap / (0.5 * w6)) + ceil_nonneg(std::log2(2.0 * w6 / epsilon));
}

double mu_theoretical(double L, double d, double n, double m, double r, double M,
                      double delta) {
  if (L <= 0.0 || d <= 0.0 || n <= 0.0 || m <= 0.0 || r <= 0.0 || M < 0.0 ||
      delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("mu_theoretical: bad arguments");
  const double inner = std::log1p(r * M * std::sqrt(2.0 * n) / L) +
                       std::log(m * d / delta) / d;
  return std::min(L, std::sqrt(32.0 * L * L * d / n) * std::sqrt(inner));
}

ResolvedConstants resolve_constants(const Cluster& cluster, const SolverConfig& cfg) {
  if (cfg.lambda > 0.0 && cfg.L > 0.0) return {cfg.lambda, cfg.L};
  const SmoothnessConstants c = smoothness_constants(cluster.loss());
  return {cfg.lambda > 0.0 ? cfg.lambda : c.lambda, cfg.L > 0.0 ? cfg.L : c.L};
}

ToleranceFn make_tolerance(const SolverConfig& cfg, double lambda, double L) {
  switch (cfg.tolerance_mode) {
    case ToleranceMode::Linear: {
      const double beta = cfg.beta;
      return [lambda, L, beta](double g) { return epsilon_k(g, lambda, L, beta); };
    }
    case ToleranceMode::Superlinear:
      return [lambda, L](double g) { return epsilon_k_superlinear(g, lambda, L); };
    case ToleranceMode::Practical: {
      const double c = cfg.practical_c;
      return [c](double g) { return c * g; };
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

struct OuterLoopState {
  NewtonTrace trace;
  Vec w;
  double lambda = 0.0;
  double L = 0.0;
};

OuterLoopState begin_run(Cluster& cluster, const SolverConfig& cfg,
                         const char* name) {
  OuterLoopState st;
  st.trace.algorithm = name;
  const ResolvedConstants rc = resolve_constants(cluster, cfg);
  st.lambda = rc.lambda;
  st.L = rc.L;
  st.w = cfg.init == InitMode::LocalAverage
             ? init_point(cluster, cfg.rho, cfg.init_tol)
             : zeros(cluster.dim());
  return st;
}

void push_row(Cluster& cluster, const SolverConfig& cfg, OuterLoopState& st,
              int k, std::int64_t rounds_at, double grad_norm, double delta,
              int pcg_iters, double mu) {
  TraceRow row;
  row.k = k;
  row.rounds = rounds_at;
  row.f = cluster.objective(st.w);
  row.ell = row.f / cluster.loss().eta;
  row.grad_norm = grad_norm;
  row.delta = delta;
  row.pcg_iters = pcg_iters;
  row.mu = mu;
  st.trace.rows.push_back(row);
  if (cfg.record_iterates) st.trace.iterates.push_back(st.w);
}

void push_terminal_row(Cluster& cluster, const SolverConfig& cfg,
                       OuterLoopState& st, int k, double mu) {
  push_row(cluster, cfg, st, k, cluster.rounds(),
           norm2(cluster.pooled_grad(st.w)), 0.0, 0, mu);
  st.trace.w_final = st.w;
}

// Stopping rule: the delta criterion when epsilon is inside the validity
// range of the self-concordant bound, otherwise the strong-convexity
// fallback ||f'(w_k)|| <= sqrt(2 lambda epsilon).
bool outer_stop(const SolverConfig& cfg, double lambda, double delta,
                double grad_norm_at_wk) {
  if (cfg.epsilon <= kSelfConcordantStopLimit)
    return stop_check(delta, cfg.beta, cfg.epsilon);
  return grad_norm_at_wk <= std::sqrt(2.0 * lambda * cfg.epsilon);
}

}  // namespace

NewtonTrace run_disco(Cluster& cluster, const SolverConfig& cfg) {
  OuterLoopState st = begin_run(cluster, cfg, "disco");
  const ToleranceFn eps_fn = make_tolerance(cfg, st.lambda, st.L);
  const int cap = cfg.pcg_iter_cap > 0 ? cfg.pcg_iter_cap
                                       : default_pcg_cap(st.lambda, st.L, cfg.beta);

  st.trace.status = RunStatus::MaxOuterExceeded;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const PcgResult res =
        distributed_pcg(cluster, st.w, cfg.mu, eps_fn, cap, cfg.precond_tol);
    push_row(cluster, cfg, st, k, rounds_at, res.grad_norm, res.delta, res.iters,
             cfg.mu);
    st.w = damped_newton_update(st.w, res.v, res.delta);
    if (outer_stop(cfg, st.lambda, res.delta, res.grad_norm)) {
      st.trace.status = RunStatus::Converged;
      push_terminal_row(cluster, cfg, st, k + 1, cfg.mu);
      return st.trace;
    }
    if (cfg.max_rounds > 0 && cluster.rounds() >= cfg.max_rounds) {
      st.trace.status = RunStatus::MaxRoundsExceeded;
      break;
    }
  }
  push_terminal_row(cluster, cfg, st, static_cast<int>(st.trace.rows.size()),
                    cfg.mu);
  return st.trace;
}

NewtonTrace run_adaptive_disco(Cluster& cluster, const SolverConfig& cfg) {
  if (cfg.mu0 <= 0.0) throw std::invalid_argument("adaptive DiSCO: mu0 > 0");
  OuterLoopState st = begin_run(cluster, cfg, "adaptive-disco");
  const ToleranceFn eps_fn = make_tolerance(cfg, st.lambda, st.L);

  double mu = cfg.mu0;
  st.trace.status = RunStatus::MaxOuterExceeded;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const std::int64_t rounds_at = cluster.rounds();

    PcgResult res;
    int retries = 0;
    int pcg_iters_total = 0;
    for (;;) {
      // Cap at T_{mu_k}; for the linear tolerance this is exactly the
      // closed-form T_mu, otherwise the general bound with the actual eps_k.
      const CapFn cap_fn =
          cfg.tolerance_mode == ToleranceMode::Linear
              ? CapFn([&](double, double) {
                  return t_mu(st.lambda, st.L, mu, cfg.beta);
                })
              : CapFn([&](double g, double e) {
                  return t_mu_general(st.lambda, st.L, mu, g, e);
                });
      res = distributed_pcg(cluster, st.w, mu, eps_fn, cap_fn, cfg.precond_tol);
      pcg_iters_total += res.iters;
      if (res.converged) break;
      mu *= 2.0;
      if (++retries > cfg.adaptive_retry_cap) {
        st.trace.status = RunStatus::Failed;
        push_row(cluster, cfg, st, k, rounds_at, res.grad_norm, res.delta,
                 pcg_iters_total, mu);
        push_terminal_row(cluster, cfg, st, k + 1, mu);
        return st.trace;
      }
    }

    const double mu_used = mu;
    mu /= 2.0;
    push_row(cluster, cfg, st, k, rounds_at, res.grad_norm, res.delta,
             pcg_iters_total, mu_used);
    st.w = damped_newton_update(st.w, res.v, res.delta);
    if (outer_stop(cfg, st.lambda, res.delta, res.grad_norm)) {
      st.trace.status = RunStatus::Converged;
      push_terminal_row(cluster, cfg, st, k + 1, mu_used);
      return st.trace;
    }
    if (cfg.max_rounds > 0 && cluster.rounds() >= cfg.max_rounds) {
      st.trace.status = RunStatus::MaxRoundsExceeded;
      break;
    }
  }
  push_terminal_row(cluster, cfg, st, static_cast<int>(st.trace.rows.size()), mu);
  return st.trace;
}

NewtonTrace run_disco_simple(Cluster& cluster, const SolverConfig& cfg) {
  OuterLoopState st = begin_run(cluster, cfg, "simple-disco");

  st.trace.status = RunStatus::MaxOuterExceeded;
  double prev_f = std::numeric_limits<double>::infinity();
  int consecutive_increases = 0;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const Vec grad = cluster.distributed_grad(st.w);  // round 1
    const double grad_norm = norm2(grad);

    Vec v = apply_preconditioner_inverse(cluster.master_shard(), cluster.loss(),
                                         st.w, cfg.mu, grad, cfg.precond_tol);
    const Vec hv = cluster.distributed_hessvec(st.w, v);  // round 2, stepsize
    const double delta = std::sqrt(std::max(0.0, dot(v, hv)));

    push_row(cluster, cfg, st, k, rounds_at, grad_norm, delta, 0, cfg.mu);

    const double f_now = st.trace.rows.back().f;
    consecutive_increases = f_now > prev_f ? consecutive_increases + 1 : 0;
    prev_f = f_now;
    if (consecutive_increases >= 5) {
      st.trace.status = RunStatus::Diverged;
      break;
    }

    st.w = damped_newton_update(st.w, v, delta);
    if (outer_stop(cfg, st.lambda, delta, grad_norm)) {
      st.trace.status = RunStatus::Converged;
      push_terminal_row(cluster, cfg, st, k + 1, cfg.mu);
      return st.trace;
    }
    if (cfg.max_rounds > 0 && cluster.rounds() >= cfg.max_rounds) {
      st.trace.status = RunStatus::MaxRoundsExceeded;
      break;
    }
  }
  push_terminal_row(cluster, cfg, st, static_cast<int>(st.trace.rows.size()),
                    cfg.mu);
  return st.trace;
}

Vec centralized_minimizer(const Cluster& cluster, double grad_tol, int max_iter) {
  Vec w = zeros(cluster.dim());
  double fw = cluster.objective(w);
  for (int it = 0; it < max_iter; ++it) {
    Vec g = cluster.pooled_grad(w);
    const double gnorm = norm2(g);
    if (gnorm <= grad_tol) return w;

    const auto hess = [&](const Vec& v) { return cluster.pooled_hessvec(w, v); };
    bool ok = false;
    Vec step = detail::conjugate_gradient(hess, g, 0.0, 1e-14 * gnorm,
                                          10 * cluster.dim() + 500, &ok);
    double gs = dot(g, step);
    if (gs <= 0.0) {
      step = g;
      gs = gnorm * gnorm;
    }
    // same noise-floor guard as the local solver: full Newton steps once the
    // predicted decrease is below what doubles can certify
    const double noise_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(fw));
    if (1e-4 * gs <= noise_floor) {
      axpy(-1.0, step, w);
      fw = cluster.objective(w);
      continue;
    }
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      Vec cand = w;
      axpy(-t, step, cand);
      const double fc = cluster.objective(cand);
      if (fc <= fw - 1e-4 * t * gs) {
        w = std::move(cand);
        fw = fc;
        break;
      }
      t *= 0.5;
    }
  }
  const double gnorm = norm2(cluster.pooled_grad(w));
  if (gnorm > grad_tol)
    throw SolveError("centralized reference solve missed its tolerance", w);
  return w;
}

}  // namespace disco
