#ifndef DISCO_VEC_HPP
#define DISCO_VEC_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace disco {

// Dense vectors are plain std::vector<double>; sparse data lives in Dataset.
using Vec = std::vector<double>;

inline Vec zeros(std::size_t d) { return Vec(d, 0.0); }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale_inplace(Vec& x, double alpha) {
  for (double& v : x) v *= alpha;
}

inline Vec scaled(const Vec& x, double alpha) {
  Vec y = x;
  scale_inplace(y, alpha);
  return y;
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec y = a;
  axpy(1.0, b, y);
  return y;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec y = a;
  axpy(-1.0, b, y);
  return y;
}

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

inline double norm1(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

// Deterministic PRNG. mt19937_64 output is fully specified by the standard,
// and the uniform/normal/bounded transforms below are hand-rolled, so streams
// are reproducible across platforms (std::*_distribution would not be).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform double in [0, 1) with 53 random bits
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; draws are paired
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // unbiased integer in [0, n) via rejection
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace disco

#endif
