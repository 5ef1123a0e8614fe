#ifndef DISCO_SOLVERS_HPP
#define DISCO_SOLVERS_HPP

#include <cstdint>

#include "disco/commsim.hpp"
#include "disco/pcg.hpp"
#include "disco/trace.hpp"
#include "disco/vec.hpp"

namespace disco {

// Auxiliary functions of self-concordant analysis.
double omega(double t);       // t - log(1+t), t >= 0
double omega_star(double t);  // -t - log(1-t), 0 <= t < 1

// eps_k = beta sqrt(lambda/L) ||f'(w_k)||  (linear-convergence tolerance).
double epsilon_k(double grad_norm, double lambda, double L, double beta);

// eps_k = (sqrt(lambda)/2) min{ omega(r)/2, omega(r)^{3/2}/10 },
// r = ||f'(w_k)|| / sqrt(L)  (superlinear tolerance).
double epsilon_k_superlinear(double grad_norm, double lambda, double L);

// w_{k+1} = w_k - v_k / (1 + delta_k).
Vec damped_newton_update(const Vec& w, const Vec& v, double delta);

// delta_k <= (1 - beta) sqrt(epsilon); valid certificate for eps <= 0.68^2.
bool stop_check(double delta, double beta, double epsilon);

// K = ceil+(gap / (omega(1/6)/2)) + ceil+(log2(2 omega(1/6) / eps)), where
// ceil+ is the smallest nonnegative integer bound.
std::int64_t iteration_bound_K(double f0_gap, double epsilon);

// mu_{r,delta} = min{ L, sqrt(32 L^2 d / n) *
//                     sqrt( ln(1 + r M sqrt(2n)/L) + ln(m d / delta)/d ) }.
double mu_theoretical(double L, double d, double n, double m, double r, double M,
                      double delta);

enum class ToleranceMode { Linear, Superlinear, Practical };
enum class InitMode { LocalAverage, Zero };
enum class AlgorithmKind { Disco, AdaptiveDisco, SimpleDisco };

struct SolverConfig {
  AlgorithmKind algorithm = AlgorithmKind::Disco;
  double beta = 1.0 / 20.0;
  double mu = 0.0;          // Disco / SimpleDisco preconditioner ridge
  double mu0 = 1e-4;        // AdaptiveDisco initial ridge (> 0)
  double rho = 0.0;         // initialization regularizer
  double epsilon = 1e-8;    // target suboptimality of the scaled f
  ToleranceMode tolerance_mode = ToleranceMode::Practical;
  double practical_c = 0.1;  // eps_k = c ||f'(w_k)||
  int max_outer = 500;
  std::int64_t max_rounds = 0;  // 0 = unbounded
  int pcg_iter_cap = 0;         // 0 = default_pcg_cap(lambda, L, beta)
  InitMode init = InitMode::LocalAverage;
  double init_tol = 1e-9;
  double precond_tol = 1e-10;
  // Smoothness constants of the scaled f; 0 = derive from the cluster loss.
  double lambda = 0.0;
  double L = 0.0;
  bool record_iterates = false;
  int adaptive_retry_cap = 64;
};

// Resolved (lambda, L) for a run: config overrides, else smoothness_constants.
struct ResolvedConstants {
  double lambda;
  double L;
};
ResolvedConstants resolve_constants(const Cluster& cluster, const SolverConfig& cfg);

ToleranceFn make_tolerance(const SolverConfig& cfg, double lambda, double L);

// DiSCO: inexact damped Newton with distributed-PCG steps, fixed mu.
NewtonTrace run_disco(Cluster& cluster, const SolverConfig& cfg);

// Adaptive DiSCO: retries PCG with mu_k doubled whenever it misses its
// tolerance within T_{mu_k} iterations; halves mu after a success.
NewtonTrace run_adaptive_disco(Cluster& cluster, const SolverConfig& cfg);

// Simple variant: v_k = (f_0''(w_k) + mu I)^{-1} f'(w_k); two rounds per
// outer iteration. Diverges when 2mu/(lambda+2mu) is large; a detector
// (five consecutive objective increases) reports that as status Diverged.
NewtonTrace run_disco_simple(Cluster& cluster, const SolverConfig& cfg);

// High-precision minimizer of the cluster objective by centralized
// Newton-CG (no rounds consumed); reference for gap reporting.
Vec centralized_minimizer(const Cluster& cluster, double grad_tol = 1e-12,
                          int max_iter = 500);

}  // namespace disco

#endif
