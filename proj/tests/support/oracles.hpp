// Test-only oracles: dense linear algebra and finite differences, independent
// of the implementation paths they validate.
#ifndef DISCO_TESTS_ORACLES_HPP
#define DISCO_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "disco/commsim.hpp"
#include "disco/dataset.hpp"
#include "disco/losses.hpp"
#include "disco/vec.hpp"

namespace oracles {

using disco::Cluster;
using disco::DatasetShard;
using disco::RegularizedLoss;
using disco::Vec;

inline Eigen::VectorXd to_eigen(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

inline Vec from_eigen(const Eigen::VectorXd& v) {
  return Vec(v.data(), v.data() + v.size());
}

// Dense pooled Hessian assembled column-by-column from Hessian-vector
// products (the only public surface; keeps the oracle honest about symmetry).
inline Eigen::MatrixXd dense_hessian(const Cluster& cluster, const Vec& w) {
  const int d = cluster.dim();
  Eigen::MatrixXd H(d, d);
  for (int j = 0; j < d; ++j) {
    Vec e = disco::zeros(d);
    e[j] = 1.0;
    const Vec col = cluster.pooled_hessvec(w, e);
    for (int i = 0; i < d; ++i) H(i, j) = col[i];
  }
  return H;
}

inline Eigen::MatrixXd dense_local_hessian(const RegularizedLoss& rl,
                                           const DatasetShard& s, const Vec& w) {
  const int d = s.dim;
  Eigen::MatrixXd H(d, d);
  for (int j = 0; j < d; ++j) {
    Vec e = disco::zeros(d);
    e[j] = 1.0;
    const Vec col = disco::local_hessvec(rl, s, w, e);
    for (int i = 0; i < d; ++i) H(i, j) = col[i];
  }
  return H;
}

// Central finite difference of local_value.
inline Vec fd_grad(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w,
                   double h = 1e-5) {
  Vec g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    Vec wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    g[i] = (disco::local_value(rl, s, wp) - disco::local_value(rl, s, wm)) /
           (2.0 * h);
  }
  return g;
}

// Central finite difference of local_grad along v.
inline Vec fd_hessvec(const RegularizedLoss& rl, const DatasetShard& s,
                      const Vec& w, const Vec& v, double h = 1e-5) {
  Vec wp = w, wm = w;
  disco::axpy(h, v, wp);
  disco::axpy(-h, v, wm);
  const Vec gp = disco::local_grad(rl, s, wp);
  const Vec gm = disco::local_grad(rl, s, wm);
  Vec out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = (gp[i] - gm[i]) / (2.0 * h);
  return out;
}

inline double rel_err(const Vec& a, const Vec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(1e-300, std::sqrt(den));
}

// u~ = [f''(w)]^{-1/2} f'(w); norm is the exact Newton decrement.
inline Vec utilde(const Cluster& cluster, const Vec& w) {
  const Eigen::MatrixXd H = dense_hessian(cluster, w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd g = to_eigen(cluster.pooled_grad(w));
  const Eigen::VectorXd u =
      es.operatorInverseSqrt() * g;
  return from_eigen(u);
}

inline Vec dense_solve(const Eigen::MatrixXd& A, const Vec& b) {
  return from_eigen(A.ldlt().solve(to_eigen(b)).eval());
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Dense ridge minimizer of a shard's local objective with extra ridge rho:
// minimizes (1/n) sum (y - x.w)^2 + ((gamma + rho/eta)/2)|w|^2 scaled by eta.
inline Vec ridge_normal_equations(const RegularizedLoss& rl, const DatasetShard& s,
                                  double rho) {
  const int d = s.dim;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  const double n = static_cast<double>(s.size());
  for (const disco::Example& ex : s.examples) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    for (const disco::Feature& f : ex.features) x(f.index) = f.value;
    A += (2.0 / n) * x * x.transpose();
    b += (2.0 / n) * ex.label * x;
  }
  A *= rl.eta;
  b *= rl.eta;
  A += (rl.eta * rl.gamma + rho) * Eigen::MatrixXd::Identity(d, d);
  return from_eigen(A.ldlt().solve(b).eval());
}

}  // namespace oracles

#endif
