#include "disco/baselines.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "disco/localsolve.hpp"
#include "disco/losses.hpp"
#include "disco/solvers.hpp"

namespace disco {

namespace {

struct Constants {
  double lambda, L, grad_stop;
};

Constants resolve(const Cluster& cluster, const BaselineConfig& cfg) {
  SolverConfig probe;
  probe.lambda = cfg.lambda;
  probe.L = cfg.L;
  const ResolvedConstants rc = resolve_constants(cluster, probe);
  return {rc.lambda, rc.L, std::sqrt(2.0 * rc.lambda * cfg.epsilon)};
}

void push_row(Cluster& cluster, NewtonTrace& trace, int k, std::int64_t rounds_at,
              const Vec& w, double grad_norm, double mu = 0.0) {
  TraceRow row;
  row.k = k;
  row.rounds = rounds_at;
  row.f = cluster.objective(w);
  row.ell = row.f / cluster.loss().eta;
  row.grad_norm = grad_norm;
  row.mu = mu;
  trace.rows.push_back(row);
}

// Terminal row: the exit iterate, charged with every round consumed so far.
void finish(Cluster& cluster, NewtonTrace& trace, const Vec& w, double grad_norm,
            double mu = 0.0) {
  push_row(cluster, trace, static_cast<int>(trace.rows.size()), cluster.rounds(),
           w, grad_norm, mu);
  trace.w_final = w;
}

}  // namespace

NewtonTrace run_gd(Cluster& cluster, GdStepPolicy policy, const BaselineConfig& cfg) {
  const Constants c = resolve(cluster, cfg);
  NewtonTrace trace;
  trace.algorithm = "gd";
  trace.status = RunStatus::MaxRoundsExceeded;

  Vec w = zeros(cluster.dim());
  double step = 1.0 / c.L;
  for (int k = 0; cluster.rounds() < cfg.max_rounds; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const Vec g = cluster.distributed_grad(w);
    const double gnorm = norm2(g);
    if (gnorm <= c.grad_stop) {
      trace.status = RunStatus::Converged;
      finish(cluster, trace, w, gnorm);
      return trace;
    }
    push_row(cluster, trace, k, rounds_at, w, gnorm);
    if (policy == GdStepPolicy::FixedInverseL) {
      axpy(-step, g, w);
    } else {
      // backtracking on f(w - t g) <= f(w) - (t/2)||g||^2
      const double fw = cluster.distributed_value(w);
      double t = std::min(2.0 * step, 1.0 / c.lambda);
      for (;;) {
        Vec cand = w;
        axpy(-t, g, cand);
        const double fc = cluster.distributed_value(cand);
        if (fc <= fw - 0.5 * t * gnorm * gnorm || cluster.rounds() >= cfg.max_rounds) {
          w = std::move(cand);
          step = t;
          break;
        }
        t *= 0.5;
      }
    }
  }
  finish(cluster, trace, w, norm2(cluster.pooled_grad(w)));
  return trace;
}

NewtonTrace run_afg(Cluster& cluster, const BaselineConfig& cfg,
                    AfgDiagnostics* diag) {
  const Constants c = resolve(cluster, cfg);
  NewtonTrace trace;
  trace.algorithm = "afg";
  trace.status = RunStatus::MaxRoundsExceeded;

  Vec w = zeros(cluster.dim());
  Vec y = w;
  double lhat = c.L;
  for (int k = 0; cluster.rounds() < cfg.max_rounds; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const Vec gy = cluster.distributed_grad(y);
    const double gnorm = norm2(gy);
    if (gnorm <= c.grad_stop) {
      trace.status = RunStatus::Converged;
      finish(cluster, trace, w, gnorm);
      return trace;
    }
    push_row(cluster, trace, k, rounds_at, w, gnorm);

    const double fy = cluster.distributed_value(y);
    lhat = std::max(0.5 * lhat, c.lambda);  // optimistic restart of the estimate
    int probes = 0;
    Vec w_next;
    for (;;) {
      w_next = y;
      axpy(-1.0 / lhat, gy, w_next);
      const double fn = cluster.distributed_value(w_next);
      ++probes;
      if (fn <= fy - gnorm * gnorm / (2.0 * lhat) ||
          cluster.rounds() >= cfg.max_rounds)
        break;
      lhat *= 2.0;  // grows only when sufficient decrease fails
    }
    if (diag) {
      diag->lhat_history.push_back(lhat);
      diag->probes_per_iter.push_back(probes);
    }

    const double q = std::sqrt(c.lambda / lhat);
    const double momentum = (1.0 - q) / (1.0 + q);
    y = w_next;
    axpy(momentum, sub(w_next, w), y);
    w = std::move(w_next);
  }
  finish(cluster, trace, w, norm2(cluster.pooled_grad(w)));
  return trace;
}

NewtonTrace run_lbfgs(Cluster& cluster, int memory, const BaselineConfig& cfg,
                      LbfgsDiagnostics* diag) {
  if (memory < 1) throw std::invalid_argument("lbfgs: memory >= 1 required");
  const Constants c = resolve(cluster, cfg);
  NewtonTrace trace;
  trace.algorithm = "lbfgs";
  trace.status = RunStatus::MaxRoundsExceeded;

  struct Pair {
    Vec s, y;
    double rho;
  };
  std::deque<Pair> hist;

  Vec w = zeros(cluster.dim());
  Vec g = cluster.distributed_grad(w);
  double fw = cluster.distributed_value(w);
  for (int k = 0; cluster.rounds() < cfg.max_rounds; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const double gnorm = norm2(g);
    if (gnorm <= c.grad_stop) {
      trace.status = RunStatus::Converged;
      finish(cluster, trace, w, gnorm);
      return trace;
    }
    push_row(cluster, trace, k, rounds_at, w, gnorm);

    // two-loop recursion
    Vec d = g;
    std::vector<double> alphas(hist.size());
    for (int i = static_cast<int>(hist.size()) - 1; i >= 0; --i) {
      alphas[i] = hist[i].rho * dot(hist[i].s, d);
      axpy(-alphas[i], hist[i].y, d);
    }
    if (!hist.empty()) {
      const Pair& last = hist.back();
      scale_inplace(d, dot(last.s, last.y) / dot(last.y, last.y));
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const double beta = hist[i].rho * dot(hist[i].y, d);
      axpy(alphas[i] - beta, hist[i].s, d);
    }

    double gd = dot(g, d);
    if (gd <= 0.0) {  // not a descent direction
      d = g;
      gd = gnorm * gnorm;
      hist.clear();
      if (diag) ++diag->direction_resets;
    }

    // Armijo backtracking from unit step
    double t = 1.0;
    Vec w_next;
    double f_next = fw;
    bool accepted = false;
    for (int ls = 0; ls < 40 && cluster.rounds() < cfg.max_rounds; ++ls) {
      w_next = w;
      axpy(-t, d, w_next);
      f_next = cluster.distributed_value(w_next);
      if (f_next <= fw - 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // round budget exhausted mid-search

    Vec g_next = cluster.distributed_grad(w_next);
    Vec s = sub(w_next, w);
    Vec yv = sub(g_next, g);
    const double sy = dot(s, yv);
    if (sy > 1e-30) {
      hist.push_back({std::move(s), std::move(yv), 1.0 / sy});
      if (static_cast<int>(hist.size()) > memory) hist.pop_front();
    }
    w = std::move(w_next);
    g = std::move(g_next);
    fw = f_next;
  }
  finish(cluster, trace, w, norm2(cluster.pooled_grad(w)));
  return trace;
}

NewtonTrace run_dane(Cluster& cluster, double mu_dane, const BaselineConfig& cfg) {
  if (mu_dane < 0.0) throw std::invalid_argument("dane: mu >= 0 required");
  const Constants c = resolve(cluster, cfg);
  NewtonTrace trace;
  trace.algorithm = "dane";
  trace.status = RunStatus::MaxRoundsExceeded;

  LocalSolveOptions lopts;
  lopts.grad_tol = 1e-9;

  Vec w = zeros(cluster.dim());
  for (int k = 0; cluster.rounds() < cfg.max_rounds; ++k) {
    const std::int64_t rounds_at = cluster.rounds();
    const Vec g = cluster.distributed_grad(w);  // round 1
    const double gnorm = norm2(g);
    if (gnorm <= c.grad_stop) {
      trace.status = RunStatus::Converged;
      finish(cluster, trace, w, gnorm, mu_dane);
      return trace;
    }
    push_row(cluster, trace, k, rounds_at, w, gnorm, mu_dane);

    // v_i = argmin f_i(u) - <f_i'(w) - f'(w), u> + (mu/2)|u - w|^2
    std::vector<Vec> locals;
    locals.reserve(cluster.machines());
    for (int i = 0; i < cluster.machines(); ++i) {
      Vec shift = local_grad(cluster.loss(), cluster.shard(i), w);
      scale_inplace(shift, -1.0);
      axpy(1.0, g, shift);  // shift = -(f_i'(w) - f'(w))
      locals.push_back(solve_local_shifted(cluster.shard(i), cluster.loss(),
                                           &shift, &w, mu_dane, lopts));
    }
    w = cluster.allreduce_average(locals, "dane_avg");  // round 2
  }
  finish(cluster, trace, w, norm2(cluster.pooled_grad(w)), mu_dane);
  return trace;
}

}  // namespace disco
