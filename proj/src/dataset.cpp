#include "disco/dataset.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "disco/errors.hpp"

namespace disco {

namespace {

bool parse_double(const std::string& tok, double* out) {
  errno = 0;
  char* end = nullptr;
  *out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && errno == 0;
}

bool parse_index(const std::string& tok, long* out) {
  errno = 0;
  char* end = nullptr;
  *out = std::strtol(tok.c_str(), &end, 10);
  return end == tok.c_str() + tok.size() && errno == 0;
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset d;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);

    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    Example ex;
    if (!parse_double(tok, &ex.label))
      throw ParseError("non-numeric label '" + tok + "'", line_no);

    int prev_idx = 0;  // file indices are 1-based
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected idx:val, got '" + tok + "'", line_no);
      long idx = 0;
      double val = 0.0;
      if (!parse_index(tok.substr(0, colon), &idx) || idx < 1)
        throw ParseError("bad feature index in '" + tok + "'", line_no);
      if (!parse_double(tok.substr(colon + 1), &val))
        throw ParseError("bad feature value in '" + tok + "'", line_no);
      if (idx <= prev_idx)
        throw ParseError("feature indices must be strictly increasing", line_no);
      prev_idx = static_cast<int>(idx);
      ex.features.push_back({static_cast<int>(idx) - 1, val});
    }
    if (prev_idx > d.dim) d.dim = prev_idx;
    d.examples.push_back(std::move(ex));
  }
  return d;
}

Dataset parse_libsvm(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

Dataset parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_libsvm(in);
}

std::string to_libsvm(const Dataset& d) {
  std::ostringstream out;
  char buf[64];
  for (const Example& ex : d.examples) {
    std::snprintf(buf, sizeof(buf), "%.17g", ex.label);
    out << buf;
    for (const Feature& f : ex.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", f.value);
      out << ' ' << (f.index + 1) << ':' << buf;
    }
    out << '\n';
  }
  return out.str();
}

Dataset normalize_rows(Dataset d) {
  // Rows already at unit norm (within a few ulp) are left untouched, which
  // makes repeated normalization bitwise idempotent.
  constexpr double kUnitWindow = 4.0 * 2.220446049250313e-16;
  for (Example& ex : d.examples) {
    const double nrm = ex.norm();
    if (nrm > 0.0 && std::fabs(nrm - 1.0) > kUnitWindow)
      for (Feature& f : ex.features) f.value /= nrm;
  }
  return d;
}

double max_row_norm(const Dataset& d) {
  double m = 0.0;
  for (const Example& ex : d.examples) m = std::max(m, ex.norm());
  return m;
}

std::vector<DatasetShard> shard(const Dataset& d, int m, std::uint64_t seed) {
  const std::size_t n = d.examples.size();
  if (m < 1 || static_cast<std::size_t>(m) > n)
    throw std::invalid_argument("shard: need 1 <= m <= number of examples");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[rng.bounded(i)]);

  // first (n % m) shards take the extra example
  std::vector<DatasetShard> shards(m);
  const std::size_t base = n / static_cast<std::size_t>(m);
  const std::size_t extra = n % static_cast<std::size_t>(m);
  std::size_t pos = 0;
  for (int i = 0; i < m; ++i) {
    shards[i].machine_id = i;
    shards[i].dim = d.dim;
    const std::size_t take = base + (static_cast<std::size_t>(i) < extra ? 1 : 0);
    shards[i].examples.reserve(take);
    for (std::size_t j = 0; j < take; ++j)
      shards[i].examples.push_back(d.examples[perm[pos++]]);
  }
  return shards;
}

Dataset synth_classification(int n_total, int d, std::uint64_t seed, double noise) {
  if (n_total < 1 || d < 1)
    throw std::invalid_argument("synth_classification: need n >= 1, d >= 1");
  if (noise < 0.0 || noise >= 0.5)
    throw std::invalid_argument("synth_classification: need 0 <= noise < 0.5");

  Rng rng(seed);
  Vec wstar(d);
  for (double& wi : wstar) wi = rng.normal();

  Dataset ds;
  ds.dim = d;
  ds.examples.reserve(n_total);
  for (int i = 0; i < n_total; ++i) {
    Example ex;
    ex.features.reserve(d);
    double sq = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = rng.normal();
      ex.features.push_back({j, v});
      sq += v * v;
    }
    const double nrm = std::sqrt(sq);
    if (nrm > 0.0)
      for (Feature& f : ex.features) f.value /= nrm;
    double margin = 0.0;
    for (int j = 0; j < d; ++j) margin += wstar[j] * ex.features[j].value;
    ex.label = margin >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform() < noise) ex.label = -ex.label;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace disco
