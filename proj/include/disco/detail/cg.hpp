#ifndef DISCO_DETAIL_CG_HPP
#define DISCO_DETAIL_CG_HPP

#include <cmath>

#include "disco/vec.hpp"

namespace disco::detail {

// CG for (A + shift I) s = b, A given as an operator; stops when the
// maintained residual satisfies ||b - (A + shift I) s|| <= tol_abs.
template <typename Op>
Vec conjugate_gradient(const Op& apply, const Vec& b, double shift,
                       double tol_abs, int cap, bool* ok) {
  const std::size_t d = b.size();
  Vec s = zeros(d);
  Vec r = b;
  Vec p = r;
  double rr = dot(r, r);
  *ok = std::sqrt(rr) <= tol_abs;
  for (int it = 0; it < cap && !*ok; ++it) {
    Vec ap = apply(p);
    if (shift != 0.0) axpy(shift, p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;  // curvature lost to roundoff; keep iterate
    const double alpha = rr / pap;
    axpy(alpha, p, s);
    axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= tol_abs) {
      *ok = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < d; ++i) p[i] = r[i] + beta * p[i];
  }
  return s;
}

}  // namespace disco::detail

#endif
