#ifndef DISCO_LOCALSOLVE_HPP
#define DISCO_LOCALSOLVE_HPP

#include "disco/commsim.hpp"
#include "disco/dataset.hpp"
#include "disco/losses.hpp"
#include "disco/vec.hpp"

namespace disco {

struct LocalSolveOptions {
  double grad_tol = 1e-9;
  int max_newton = 200;
  double cg_rel_tol = 1e-12;
  int cg_cap = 0;  // 0 = 10*d + 300
  Vec* objective_history = nullptr;  // one entry per accepted Newton iterate
};

// Minimizes f_i(w) + linear.w + (rho/2) |w - prox_center|^2 over w by damped
// Newton with inner CG; deterministic, objective strictly nonincreasing.
// linear/prox_center may be null (treated as zero). Throws SolveError
// carrying the best iterate if max_newton is exhausted.
Vec solve_local_shifted(const DatasetShard& shard, const RegularizedLoss& rl,
                        const Vec* linear, const Vec* prox_center, double rho,
                        const LocalSolveOptions& opts = {});

// arg min_w f_i(w) + (rho/2)|w|^2, to gradient norm <= tol.
Vec solve_local_regularized(const DatasetShard& shard, const RegularizedLoss& rl,
                            double rho, double tol);

// w_0 = (1/m) sum_i w_hat_i; one communication round (the average).
Vec init_point(Cluster& cluster, double rho, double tol = 1e-9);

// rho = sqrt(6) G / (sqrt(n) D).
double rho_default(double G, double D, double n);

// s ~= (f_0''(w_k) + mu I)^{-1} r by master-local CG:
// ||(H_0 + mu I) s - r|| <= tol * ||r||. Touches only the master shard and
// consumes no communication rounds. Throws SolveError if cap is exhausted.
Vec apply_preconditioner_inverse(const DatasetShard& master_shard,
                                 const RegularizedLoss& rl, const Vec& w_k,
                                 double mu, const Vec& r, double tol,
                                 int cap = 0);

}  // namespace disco

#endif
