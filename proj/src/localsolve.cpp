#include "disco/localsolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "disco/detail/cg.hpp"
#include "disco/errors.hpp"

namespace disco {

using detail::conjugate_gradient;

Vec solve_local_shifted(const DatasetShard& shard, const RegularizedLoss& rl,
                        const Vec* linear, const Vec* prox_center, double rho,
                        const LocalSolveOptions& opts) {
  const std::size_t d = shard.dim;
  if (linear && linear->size() != d) throw DimensionError("linear term dim");
  if (prox_center && prox_center->size() != d)
    throw DimensionError("prox center dim");
  if (rho < 0.0) throw std::invalid_argument("rho >= 0 required");

  const auto objective = [&](const Vec& w) {
    double v = local_value(rl, shard, w);
    if (linear) v += dot(*linear, w);
    if (rho > 0.0) {
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = w[i] - (prox_center ? (*prox_center)[i] : 0.0);
        sq += diff * diff;
      }
      v += 0.5 * rho * sq;
    }
    return v;
  };
  const auto gradient = [&](const Vec& w) {
    Vec g = local_grad(rl, shard, w);
    if (linear) axpy(1.0, *linear, g);
    if (rho > 0.0)
      for (std::size_t i = 0; i < d; ++i)
        g[i] += rho * (w[i] - (prox_center ? (*prox_center)[i] : 0.0));
    return g;
  };

  Vec w = prox_center ? *prox_center : zeros(d);
  double fw = objective(w);
  if (opts.objective_history) opts.objective_history->push_back(fw);
  const int cg_cap = opts.cg_cap > 0 ? opts.cg_cap : 10 * static_cast<int>(d) + 300;

  for (int it = 0; it < opts.max_newton; ++it) {
    Vec g = gradient(w);
    const double gnorm = norm2(g);
    if (gnorm <= opts.grad_tol) return w;

    const auto hess = [&](const Vec& v) { return local_hessvec(rl, shard, w, v); };
    bool cg_ok = false;
    Vec step = conjugate_gradient(hess, g, rho, opts.cg_rel_tol * gnorm, cg_cap,
                                  &cg_ok);
    double gs = dot(g, step);
    if (gs <= 0.0) {  // fall back to steepest descent
      step = g;
      gs = gnorm * gnorm;
    }

    // Armijo backtracking on w - t * step. Once the predicted decrease falls
    // below the evaluation noise floor of f, the test cannot certify progress
    // in doubles; take the full Newton step (we are in the quadratic basin).
    const double noise_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(fw));
    if (1e-4 * gs <= noise_floor) {
      axpy(-1.0, step, w);
      fw = objective(w);
    } else {
      double t = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        Vec cand = w;
        axpy(-t, step, cand);
        const double fc = objective(cand);
        if (fc <= fw - 1e-4 * t * gs) {
          w = std::move(cand);
          fw = fc;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted)
        throw SolveError("local solve: line search failed", std::move(w));
    }
    if (opts.objective_history) opts.objective_history->push_back(fw);
  }

  Vec g = gradient(w);
  if (norm2(g) <= opts.grad_tol) return w;
  throw SolveError("local solve: Newton iteration cap exceeded", std::move(w));
}

Vec solve_local_regularized(const DatasetShard& shard, const RegularizedLoss& rl,
                            double rho, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("tol > 0 required");
  LocalSolveOptions opts;
  opts.grad_tol = tol;
  return solve_local_shifted(shard, rl, nullptr, nullptr, rho, opts);
}

Vec init_point(Cluster& cluster, double rho, double tol) {
  std::vector<Vec> locals;
  locals.reserve(cluster.machines());
  for (int i = 0; i < cluster.machines(); ++i)
    locals.push_back(
        solve_local_regularized(cluster.shard(i), cluster.loss(), rho, tol));
  return cluster.allreduce_average(locals, "init");
}

double rho_default(double G, double D, double n) {
  if (G <= 0.0 || D <= 0.0 || n <= 0.0)
    throw std::invalid_argument("rho_default: need G, D, n > 0");
  return std::sqrt(6.0) * G / (std::sqrt(n) * D);
}

Vec apply_preconditioner_inverse(const DatasetShard& master_shard,
                                 const RegularizedLoss& rl, const Vec& w_k,
                                 double mu, const Vec& r, double tol, int cap) {
  if (mu < 0.0) throw std::invalid_argument("mu >= 0 required");
  if (tol <= 0.0) throw std::invalid_argument("tol > 0 required");
  const double rnorm = norm2(r);
  if (rnorm == 0.0) return zeros(r.size());

  const auto hess = [&](const Vec& v) {
    return local_hessvec(rl, master_shard, w_k, v);
  };
  if (cap <= 0) cap = 10 * static_cast<int>(r.size()) + 300;
  bool ok = false;
  Vec s = conjugate_gradient(hess, r, mu, tol * rnorm, cap, &ok);
  if (!ok) {
    // the CG residual recursion can drift; accept if the true residual passes
    Vec res = hess(s);
    axpy(mu, s, res);
    axpy(-1.0, r, res);
    if (norm2(res) > tol * rnorm)
      throw SolveError("preconditioner solve: CG cap exceeded", std::move(s));
  }
  return s;
}

}  // namespace disco
