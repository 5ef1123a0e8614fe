#ifndef DISCO_LOSSES_HPP
#define DISCO_LOSSES_HPP

#include "disco/dataset.hpp"
#include "disco/vec.hpp"

namespace disco {

enum class LossKind { Quadratic, Logistic, SmoothedHinge };

struct Loss {
  LossKind kind = LossKind::Logistic;
  double p = 3.0;  // smoothed-hinge exponent, p >= 3
};

struct ScalarDerivs {
  double value;
  double d1;
  double d2;
  double d3;
};

// phi and its first three derivatives at t. For Logistic/SmoothedHinge, t is
// the classification margin y * w.x; for Quadratic, t is the residual y - w.x.
// The logistic branch is overflow-safe for large |t|.
ScalarDerivs scalar_derivs(const Loss& loss, double t);

// Regularized empirical loss on one shard. The unscaled loss is
//   ell(w) = (1/n) sum_j phi(.) + (gamma/2) |w|^2,
// and all evaluations return the scaled f = eta * ell.
struct RegularizedLoss {
  Loss loss;
  double gamma = 1e-5;  // regularization of the unscaled loss
  double B = 1.0;       // bound on feature row norms
  double eta = 1.0;     // scaling factor, f = eta * ell
};

double local_value(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w);
Vec local_grad(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w);
Vec local_hessvec(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w,
                  const Vec& v);

// Self-concordance parameter M_ell of the regularized unscaled loss:
// 0 for quadratic, B/sqrt(gamma) for logistic,
// (p-2) B^{1+2/(p-2)} / gamma^{1/2+1/(p-2)} for the smoothed hinge.
double self_concordance_parameter(const Loss& loss, double B, double gamma);

// eta making eta*ell standard self-concordant: max(1, M_ell^2 / 4).
double standard_scaling(double m_ell);

struct SmoothnessConstants {
  double lambda;  // strong convexity of the scaled f
  double L;       // smoothness of the scaled f
  double V0;
  double G;
  double M;
};

// Constants of the scaled f = eta * ell. by bounds |label| (quadratic only).
SmoothnessConstants smoothness_constants(const Loss& loss, double B, double gamma,
                                         double eta, double by = 1.0);

inline SmoothnessConstants smoothness_constants(const RegularizedLoss& rl,
                                                double by = 1.0) {
  return smoothness_constants(rl.loss, rl.B, rl.gamma, rl.eta, by);
}

}  // namespace disco

#endif
