#ifndef DISCO_COMMSIM_HPP
#define DISCO_COMMSIM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disco/dataset.hpp"
#include "disco/losses.hpp"
#include "disco/vec.hpp"

namespace disco {

// Every counted collective appends one entry. Diagnostic evaluations (trace
// objective values, hessian_similarity) do not consume rounds; they appear
// with round = -1 and an op tag prefixed "diag.", so that the number of
// entries with round >= 1 always equals the round counter.
struct LedgerEntry {
  std::int64_t round;  // 1-based round index, -1 for diagnostics
  std::string op;
  std::int64_t scalars;
};

struct RoundLedger {
  std::vector<LedgerEntry> entries;
  void to_csv(std::ostream& out) const;  // header: round,op,scalars
};

// Simulated m-machine cluster; machine 0 is the master. One collective =
// one broadcast of O(d) scalars plus one reduction of O(d) scalars, summed
// in ascending machine-id order so results are bit-reproducible. The cluster
// is externally synchronized: one collective at a time.
class Cluster {
 public:
  Cluster(std::vector<DatasetShard> shards, RegularizedLoss loss);

  int machines() const { return static_cast<int>(shards_.size()); }
  int dim() const { return dim_; }
  const RegularizedLoss& loss() const { return loss_; }
  const DatasetShard& shard(int i) const { return shards_.at(i); }
  const DatasetShard& master_shard() const { return shards_.front(); }

  std::int64_t rounds() const { return rounds_; }
  std::int64_t scalars_moved() const { return scalars_moved_; }
  const RoundLedger& ledger() const { return ledger_; }

  // --- counted collectives (one communication round each) ---

  // Elementwise average of one vector per machine.
  Vec allreduce_average(const std::vector<Vec>& per_machine,
                        std::string_view tag = "allreduce");

  // f'(w) = (1/m) sum_i f_i'(w).
  Vec distributed_grad(const Vec& w);

  // f(w), as the average of local values.
  double distributed_value(const Vec& w);

  // f''(w) v.
  Vec distributed_hessvec(const Vec& w, const Vec& v);

  // (H u, H v) sharing a single round, as in the PCG iteration.
  std::pair<Vec, Vec> distributed_hessvec_pair(const Vec& w, const Vec& u,
                                               const Vec& v);

  // --- diagnostics (no rounds consumed) ---

  double objective(const Vec& w) const;           // f(w)
  double objective_unscaled(const Vec& w) const;  // ell(w) = f(w) / eta
  Vec pooled_grad(const Vec& w) const;
  Vec pooled_hessvec(const Vec& w, const Vec& v) const;

  // Power-iteration estimate of ||f_0''(w) - f''(w)||_2 using only
  // Hessian-vector products of the difference operator.
  double hessian_similarity(const Vec& w, int iters) const;

 private:
  void check_dim(const Vec& v) const;
  void record(std::string_view op, std::int64_t scalars);
  void record_diag(std::string_view op) const;

  std::vector<DatasetShard> shards_;
  RegularizedLoss loss_;
  int dim_;
  std::int64_t rounds_ = 0;
  std::int64_t scalars_moved_ = 0;
  mutable RoundLedger ledger_;
};

}  // namespace disco

#endif
