#ifndef DISCO_DATASET_HPP
#define DISCO_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "disco/vec.hpp"

namespace disco {

struct Feature {
  int index;     // 0-based internally; LIBSVM files are 1-based
  double value;
};

struct Example {
  std::vector<Feature> features;  // indices strictly increasing
  double label;                   // +-1 for classification, real for regression

  double dot(const Vec& w) const {
    double s = 0.0;
    for (const Feature& f : features) s += f.value * w[f.index];
    return s;
  }
  double norm() const {
    double s = 0.0;
    for (const Feature& f : features) s += f.value * f.value;
    return std::sqrt(s);
  }
};

struct Dataset {
  std::vector<Example> examples;
  int dim = 0;

  std::size_t size() const { return examples.size(); }
};

// One machine's local sample set.
struct DatasetShard {
  int machine_id = 0;
  std::vector<Example> examples;
  int dim = 0;

  std::size_t size() const { return examples.size(); }
};

// LIBSVM text: `<label> <idx>:<val> ...` per line, idx >= 1 strictly
// increasing; `#` starts a comment. Throws ParseError with the line number.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(const std::string& text);
Dataset parse_libsvm_file(const std::string& path);

// Inverse of parse_libsvm (indices re-emitted 1-based).
std::string to_libsvm(const Dataset& d);

// Scales every row with nonzero norm to unit l2 norm; labels untouched.
Dataset normalize_rows(Dataset d);

double max_row_norm(const Dataset& d);

// Shuffles with a seeded Fisher-Yates permutation (mt19937_64), then deals
// contiguous blocks; shard sizes differ by at most one. Requires 1 <= m <= N.
std::vector<DatasetShard> shard(const Dataset& d, int m, std::uint64_t seed);

// Rows drawn standard normal then row-normalized; labels sign(w*.x) for a
// seeded ground-truth w*, each flipped independently with probability noise.
Dataset synth_classification(int n_total, int d, std::uint64_t seed, double noise);

}  // namespace disco

#endif
