// Shared dataset/cluster fixtures for the test suites.
#ifndef DISCO_TESTS_FIXTURES_HPP
#define DISCO_TESTS_FIXTURES_HPP

#include <cstdint>
#include <vector>

#include "disco/commsim.hpp"
#include "disco/dataset.hpp"
#include "disco/losses.hpp"

namespace fixtures {

using namespace disco;

inline Cluster make_cluster(const Dataset& data, int m, std::uint64_t seed,
                            RegularizedLoss rl) {
  rl.B = std::max(1e-12, max_row_norm(data));
  return Cluster(shard(data, m, seed), rl);
}

inline Cluster logistic_cluster(int n, int d, int m, std::uint64_t seed,
                                double gamma, double eta = 1.0,
                                double noise = 0.1) {
  RegularizedLoss rl;
  rl.loss = {LossKind::Logistic, 0.0};
  rl.gamma = gamma;
  rl.eta = eta;
  return make_cluster(synth_classification(n, d, seed, noise), m, seed, rl);
}

inline Cluster ridge_cluster(int n, int d, int m, std::uint64_t seed,
                             double gamma, double eta = 1.0) {
  RegularizedLoss rl;
  rl.loss = {LossKind::Quadratic, 0.0};
  rl.gamma = gamma;
  rl.eta = eta;
  return make_cluster(synth_classification(n, d, seed, 0.2), m, seed, rl);
}

// Theory-scaled logistic instance (standard self-concordant by construction).
inline Cluster scaled_logistic_cluster(int n, int d, int m, std::uint64_t seed,
                                       double gamma) {
  RegularizedLoss rl;
  rl.loss = {LossKind::Logistic, 0.0};
  rl.gamma = gamma;
  Dataset data = synth_classification(n, d, seed, 0.1);
  rl.B = std::max(1e-12, max_row_norm(data));
  rl.eta = standard_scaling(self_concordance_parameter(rl.loss, rl.B, rl.gamma));
  return Cluster(shard(data, m, seed), rl);
}

// m copies of the same shard: local Hessians equal the global one exactly.
inline Cluster identical_shards_cluster(int n, int d, int m, std::uint64_t seed,
                                        RegularizedLoss rl) {
  Dataset data = synth_classification(n, d, seed, 0.1);
  rl.B = std::max(1e-12, max_row_norm(data));
  auto one = shard(data, 1, seed);
  std::vector<DatasetShard> shards;
  for (int i = 0; i < m; ++i) {
    DatasetShard s = one.front();
    s.machine_id = i;
    shards.push_back(std::move(s));
  }
  return Cluster(std::move(shards), rl);
}

}  // namespace fixtures

#endif
