#ifndef DISCO_COMPOSITE_HPP
#define DISCO_COMPOSITE_HPP

#include "disco/commsim.hpp"
#include "disco/solvers.hpp"
#include "disco/trace.hpp"

namespace disco {

// Componentwise soft-thresholding, the proximal map of threshold * ||.||_1.
Vec prox_l1(const Vec& x, double threshold);

// Radial projection onto {|w| <= radius}.
Vec project_l2_ball(const Vec& x, double radius);

// Simple-structure regularizer Psi for F = f + Psi.
struct Psi {
  enum class Kind { L1, L2Ball } kind = Kind::L1;
  double sigma = 0.0;   // l1 weight
  double radius = 1.0;  // ball radius

  double value(const Vec& w) const;
  // prox of step * Psi (the ball projection ignores the step).
  Vec prox(const Vec& z, double step) const;
};

struct CompositeObjective {
  Psi psi;  // sigma = 0 degenerates to the smooth problem
};

// Gradient mapping of the proximal-Newton subproblem at (w_k, v):
//   g = argmin_g (L/2)|g|^2 + <f''(w_k) v - f'(w_k), g> + Psi(w_k - v + g),
// in closed form through the prox. v = 0 and Hv = 0 tests whether w_k itself
// is stationary. Costs nothing: the Hessian product is supplied by the caller.
Vec gradient_mapping_from_parts(const Vec& w_k, const Vec& grad, const Vec& v,
                                const Vec& hv, double L, const Psi& psi);

// Same, paying one communication round for the f''(w_k) v product.
Vec gradient_mapping(Cluster& cluster, const Vec& w_k, const Vec& grad,
                     const Vec& v, double L, const Psi& psi);

struct PapgResult {
  Vec v;
  double delta = 0.0;          // sqrt(v^T H v) from the exit-round product
  double mapping_norm = 0.0;   // ||g(v)|| at exit
  int iters = 0;
  std::int64_t rounds_used = 0;
  bool converged = false;
};

// Preconditioned accelerated proximal gradient for the proximal-Newton
// subproblem; one round per iteration (a shared Hs/Hv product: Hs drives the
// update, Hv checks the previous iterate's gradient mapping).
PapgResult inner_papg(Cluster& cluster, const Vec& w_k, const Vec& grad,
                      double mu, double lambda, double L, double eps_k,
                      int iter_cap, const Psi& psi,
                      double master_tol = 1e-10);

// Inexact proximal-Newton DiSCO for F = f + Psi. Starts at w = 0 unless
// cfg.init says otherwise; stops when the gradient mapping at the current
// iterate falls below (1 - beta) sqrt(epsilon * lambda).
NewtonTrace run_disco_composite(Cluster& cluster, const SolverConfig& cfg,
                                const Psi& psi);

// Reference solve of min F by centralized proximal gradient (no rounds).
Vec centralized_composite_minimizer(const Cluster& cluster, const Psi& psi,
                                    double mapping_tol = 1e-12,
                                    int max_iter = 2000000);

}  // namespace disco

#endif
