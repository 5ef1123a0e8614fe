#ifndef DISCO_PCG_HPP
#define DISCO_PCG_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "disco/commsim.hpp"
#include "disco/vec.hpp"

namespace disco {

struct PcgResult {
  Vec v;                      // inexact Newton step
  double delta = 0.0;         // delta_k = sqrt(v^T H v), from communicated products
  double residual_norm = 0.0; // ||f'(w_k) - H v|| at exit
  int iters = 0;
  std::int64_t rounds_used = 0;  // always iters + 1 (the extra is the gradient)
  bool converged = false;
  double eps_k = 0.0;
  double grad_norm = 0.0;
  Vec grad;  // f'(w_k), for reuse by callers
};

// Tolerance eps_k as a function of ||f'(w_k)||, evaluated after the gradient
// round inside the PCG call.
using ToleranceFn = std::function<double(double grad_norm)>;

// Iteration cap as a function of (||f'(w_k)||, eps_k); adaptive DiSCO caps at
// T_{mu_k}, which depends on the gradient formed inside the call.
using CapFn = std::function<int(double grad_norm, double eps_k)>;

// Per-iteration snapshots for validation (d is small wherever this is used).
struct PcgDiagnostics {
  std::vector<Vec> iterates;        // v^(t+1) per iteration
  std::vector<Vec> residuals;       // maintained r^(t+1) per iteration
  std::vector<double> alphas;
};

// Distributed PCG for f''(w_k) v = f'(w_k) with preconditioner
// P = f_0''(w_k) + mu I applied master-locally. Consumes one round for the
// gradient plus one per iteration. On iteration-cap exhaustion returns the
// partial result with converged = false (consumed by adaptive DiSCO).
PcgResult distributed_pcg(Cluster& cluster, const Vec& w_k, double mu,
                          const ToleranceFn& eps_fn, const CapFn& cap_fn,
                          double precond_tol = 1e-10,
                          PcgDiagnostics* diag = nullptr);

PcgResult distributed_pcg(Cluster& cluster, const Vec& w_k, double mu,
                          const ToleranceFn& eps_fn, int iter_cap,
                          double precond_tol = 1e-10,
                          PcgDiagnostics* diag = nullptr);

PcgResult distributed_pcg(Cluster& cluster, const Vec& w_k, double mu,
                          double eps_k, int iter_cap,
                          double precond_tol = 1e-10,
                          PcgDiagnostics* diag = nullptr);

// T_mu = ceil( sqrt(1 + 2 mu / lambda) * ln(2 L / (beta lambda)) ).
int t_mu(double lambda, double L, double mu, double beta);

// General form of the PCG iteration bound for an arbitrary tolerance:
// ceil( sqrt(1 + 2 mu / lambda) * ln(2 sqrt(L/lambda) ||f'|| / eps_k) ).
// Coincides with t_mu when eps_k = beta sqrt(lambda/L) ||f'||.
int t_mu_general(double lambda, double L, double mu, double grad_norm,
                 double eps_k);

// Iteration cap for misspecified mu: sqrt(2 + 2L/lambda) ln(2L/(beta lambda)),
// plus slack so non-adaptive runs cannot loop forever.
int default_pcg_cap(double lambda, double L, double beta);

// Dense validation instrument: extreme eigenvalues of P^{-1} H at w
// (equivalently of P^{-1/2} H P^{-1/2}). Requires dim <= 50.
std::pair<double, double> precond_spectrum_check(const Cluster& cluster,
                                                 const Vec& w, double mu);

}  // namespace disco

#endif
