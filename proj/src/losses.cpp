#include "disco/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "disco/errors.hpp"

namespace disco {

namespace {

double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

ScalarDerivs logistic_derivs(double t) {
  // phi(t) = log(1 + e^{-t}), evaluated via log1p to survive |t| in the
  // hundreds (eta-scaled problems produce such margins).
  const double value = t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
  const double s = stable_sigmoid(t);
  const double d2 = s * (1.0 - s);
  return {value, s - 1.0, d2, (1.0 - 2.0 * s) * d2};
}

// Five-piece C^2 surrogate for the hinge loss, p >= 3. Breakpoints:
// -a, 1-a, 1, 2 with a = (p-3)/(p-1).
ScalarDerivs smoothed_hinge_derivs(double p, double t) {
  const double a = (p - 3.0) / (p - 1.0);
  const double c = 1.5 - (p - 2.0) / (p - 1.0);
  if (t < -a) return {c - t, -1.0, 0.0, 0.0};
  if (t < 1.0 - a) {
    const double u = t + a;
    return {c - t + std::pow(u, p) / (p * (p - 1.0)),
            -1.0 + std::pow(u, p - 1.0) / (p - 1.0),
            std::pow(u, p - 2.0),
            (p - 2.0) * std::pow(u, p - 3.0)};
  }
  if (t < 1.0) {
    return {(p + 1.0) / (p * (p - 1.0)) - t / (p - 1.0) + 0.5 * (1.0 - t) * (1.0 - t),
            -1.0 / (p - 1.0) - (1.0 - t), 1.0, 0.0};
  }
  if (t < 2.0) {
    const double u = 2.0 - t;
    return {std::pow(u, p) / (p * (p - 1.0)),
            -std::pow(u, p - 1.0) / (p - 1.0),
            std::pow(u, p - 2.0),
            -(p - 2.0) * std::pow(u, p - 3.0)};
  }
  return {0.0, 0.0, 0.0, 0.0};
}

void check_dim(const DatasetShard& s, const Vec& w) {
  if (static_cast<int>(w.size()) != s.dim)
    throw DimensionError("vector dimension does not match shard dim");
}

}  // namespace

ScalarDerivs scalar_derivs(const Loss& loss, double t) {
  switch (loss.kind) {
    case LossKind::Quadratic:
      return {t * t, 2.0 * t, 2.0, 0.0};
    case LossKind::Logistic:
      return logistic_derivs(t);
    case LossKind::SmoothedHinge:
      if (loss.p < 3.0) throw std::invalid_argument("smoothed hinge requires p >= 3");
      return smoothed_hinge_derivs(loss.p, t);
  }
  throw std::logic_error("unreachable");
}

double local_value(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w) {
  check_dim(s, w);
  double acc = 0.0;
  for (const Example& ex : s.examples) {
    const double z = ex.dot(w);
    const double t = rl.loss.kind == LossKind::Quadratic ? ex.label - z
                                                         : ex.label * z;
    acc += scalar_derivs(rl.loss, t).value;
  }
  const double n = s.examples.empty() ? 1.0 : static_cast<double>(s.examples.size());
  return rl.eta * (acc / n + 0.5 * rl.gamma * dot(w, w));
}

Vec local_grad(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w) {
  check_dim(s, w);
  Vec g = zeros(w.size());
  for (const Example& ex : s.examples) {
    const double z = ex.dot(w);
    double coeff;
    if (rl.loss.kind == LossKind::Quadratic) {
      // d/dw (y - w.x)^2 = 2 (w.x - y) x
      coeff = 2.0 * (z - ex.label);
    } else {
      coeff = ex.label * scalar_derivs(rl.loss, ex.label * z).d1;
    }
    for (const Feature& f : ex.features) g[f.index] += coeff * f.value;
  }
  const double n = s.examples.empty() ? 1.0 : static_cast<double>(s.examples.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = rl.eta * (g[i] / n + rl.gamma * w[i]);
  return g;
}

Vec local_hessvec(const RegularizedLoss& rl, const DatasetShard& s, const Vec& w,
                  const Vec& v) {
  check_dim(s, w);
  check_dim(s, v);
  Vec hv = zeros(w.size());
  for (const Example& ex : s.examples) {
    const double xv = ex.dot(v);
    double coeff;
    if (rl.loss.kind == LossKind::Quadratic) {
      coeff = 2.0 * xv;
    } else {
      const double t = ex.label * ex.dot(w);
      coeff = scalar_derivs(rl.loss, t).d2 * xv;  // label^2 = 1
    }
    for (const Feature& f : ex.features) hv[f.index] += coeff * f.value;
  }
  const double n = s.examples.empty() ? 1.0 : static_cast<double>(s.examples.size());
  for (std::size_t i = 0; i < hv.size(); ++i)
    hv[i] = rl.eta * (hv[i] / n + rl.gamma * v[i]);
  return hv;
}

double self_concordance_parameter(const Loss& loss, double B, double gamma) {
  if (gamma <= 0.0)
    throw std::domain_error("self-concordance requires gamma > 0");
  if (B <= 0.0) throw std::domain_error("need B > 0");
  switch (loss.kind) {
    case LossKind::Quadratic:
      return 0.0;
    case LossKind::Logistic:
      return B / std::sqrt(gamma);  // Q = 1, alpha = 0
    case LossKind::SmoothedHinge: {
      const double p = loss.p;
      return (p - 2.0) * std::pow(B, 1.0 + 2.0 / (p - 2.0)) /
             std::pow(gamma, 0.5 + 1.0 / (p - 2.0));
    }
  }
  throw std::logic_error("unreachable");
}

double standard_scaling(double m_ell) {
  if (m_ell < 0.0) throw std::domain_error("need M >= 0");
  return std::max(1.0, m_ell * m_ell / 4.0);
}

SmoothnessConstants smoothness_constants(const Loss& loss, double B, double gamma,
                                         double eta, double by) {
  SmoothnessConstants c{};
  c.lambda = eta * gamma;
  switch (loss.kind) {
    case LossKind::Quadratic:
      c.V0 = eta * by * by;
      c.G = eta * 2.0 * B * (by + B * by * std::sqrt(2.0 / gamma));
      c.L = eta * (gamma + 2.0 * B * B);
      c.M = 0.0;
      break;
    case LossKind::Logistic:
      c.V0 = eta * std::log(2.0);
      c.G = eta * B;
      c.L = eta * (B * B / 4.0 + gamma);
      c.M = eta * B * B * B / 10.0;
      break;
    case LossKind::SmoothedHinge:
      c.V0 = eta;
      c.G = eta * B;
      c.L = eta * (B * B + gamma);
      c.M = eta * (loss.p - 2.0) * B * B * B;
      break;
  }
  return c;
}

}  // namespace disco
