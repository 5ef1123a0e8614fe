#ifndef DISCO_BASELINES_HPP
#define DISCO_BASELINES_HPP

#include <cstdint>

#include "disco/commsim.hpp"
#include "disco/trace.hpp"

namespace disco {

// Round accounting for every baseline is honest: each gradient collective and
// each distributed objective evaluation used by a line search costs one
// round. All baselines start from w = 0 and stop at
// ||f'(w)|| <= sqrt(2 lambda epsilon) or at the round cap.

enum class GdStepPolicy { FixedInverseL, Backtracking };

struct BaselineConfig {
  double epsilon = 1e-8;
  std::int64_t max_rounds = 1000;
  // 0 = derive lambda/L from the cluster loss.
  double lambda = 0.0;
  double L = 0.0;
};

NewtonTrace run_gd(Cluster& cluster, GdStepPolicy policy, const BaselineConfig& cfg);

// Nesterov acceleration with adaptive (doubling/halving) Lipschitz estimate.
struct AfgDiagnostics {
  std::vector<double> lhat_history;  // accepted estimate per iteration
  std::vector<int> probes_per_iter;
};
NewtonTrace run_afg(Cluster& cluster, const BaselineConfig& cfg,
                    AfgDiagnostics* diag = nullptr);

struct LbfgsDiagnostics {
  int direction_resets = 0;
};
NewtonTrace run_lbfgs(Cluster& cluster, int memory, const BaselineConfig& cfg,
                      LbfgsDiagnostics* diag = nullptr);

// DANE: round 1 aggregates f'(w_k); every machine solves its mirrored local
// subproblem; round 2 averages the local solutions. Exactly 2 rounds/iter.
NewtonTrace run_dane(Cluster& cluster, double mu_dane, const BaselineConfig& cfg);

}  // namespace disco

#endif
