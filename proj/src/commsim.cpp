#include "disco/commsim.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "disco/errors.hpp"

namespace disco {

void RoundLedger::to_csv(std::ostream& out) const {
  out << "round,op,scalars\n";
  for (const LedgerEntry& e : entries)
    out << e.round << ',' << e.op << ',' << e.scalars << '\n';
}

Cluster::Cluster(std::vector<DatasetShard> shards, RegularizedLoss loss)
    : shards_(std::move(shards)), loss_(loss) {
  if (shards_.empty()) throw std::invalid_argument("cluster needs >= 1 shard");
  dim_ = shards_.front().dim;
  for (const DatasetShard& s : shards_)
    if (s.dim != dim_) throw DimensionError("shards disagree on dim");
}

void Cluster::check_dim(const Vec& v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw DimensionError("vector dimension does not match cluster dim");
}

void Cluster::record(std::string_view op, std::int64_t scalars) {
  ++rounds_;
  scalars_moved_ += scalars;
  ledger_.entries.push_back({rounds_, std::string(op), scalars});
}

void Cluster::record_diag(std::string_view op) const {
  ledger_.entries.push_back({-1, "diag." + std::string(op), 0});
}

Vec Cluster::allreduce_average(const std::vector<Vec>& per_machine,
                               std::string_view tag) {
  if (static_cast<int>(per_machine.size()) != machines())
    throw DimensionError("allreduce needs one vector per machine");
  const std::size_t d = per_machine.front().size();
  for (const Vec& v : per_machine)
    if (v.size() != d) throw DimensionError("allreduce vectors disagree on dim");

  Vec sum = zeros(d);
  for (const Vec& v : per_machine) axpy(1.0, v, sum);  // ascending machine id
  scale_inplace(sum, 1.0 / machines());
  record(tag, 2 * machines() * static_cast<std::int64_t>(d));
  return sum;
}

Vec Cluster::distributed_grad(const Vec& w) {
  check_dim(w);
  Vec sum = zeros(w.size());
  for (const DatasetShard& s : shards_) axpy(1.0, local_grad(loss_, s, w), sum);
  scale_inplace(sum, 1.0 / machines());
  record("grad", 2 * machines() * static_cast<std::int64_t>(dim_));
  return sum;
}

double Cluster::distributed_value(const Vec& w) {
  check_dim(w);
  double sum = 0.0;
  for (const DatasetShard& s : shards_) sum += local_value(loss_, s, w);
  record("value", machines() * static_cast<std::int64_t>(dim_ + 1));
  return sum / machines();
}

Vec Cluster::distributed_hessvec(const Vec& w, const Vec& v) {
  check_dim(w);
  check_dim(v);
  Vec sum = zeros(w.size());
  for (const DatasetShard& s : shards_)
    axpy(1.0, local_hessvec(loss_, s, w, v), sum);
  scale_inplace(sum, 1.0 / machines());
  record("hessvec", 2 * machines() * static_cast<std::int64_t>(dim_));
  return sum;
}

std::pair<Vec, Vec> Cluster::distributed_hessvec_pair(const Vec& w, const Vec& u,
                                                      const Vec& v) {
  check_dim(w);
  check_dim(u);
  check_dim(v);
  Vec hu = zeros(w.size());
  Vec hv = zeros(w.size());
  for (const DatasetShard& s : shards_) {
    axpy(1.0, local_hessvec(loss_, s, w, u), hu);
    axpy(1.0, local_hessvec(loss_, s, w, v), hv);
  }
  scale_inplace(hu, 1.0 / machines());
  scale_inplace(hv, 1.0 / machines());
  record("hessvec_pair", 4 * machines() * static_cast<std::int64_t>(dim_));
  return {std::move(hu), std::move(hv)};
}

double Cluster::objective(const Vec& w) const {
  check_dim(w);
  double sum = 0.0;
  for (const DatasetShard& s : shards_) sum += local_value(loss_, s, w);
  record_diag("value");
  return sum / machines();
}

double Cluster::objective_unscaled(const Vec& w) const {
  return objective(w) / loss_.eta;
}

Vec Cluster::pooled_grad(const Vec& w) const {
  check_dim(w);
  Vec sum = zeros(w.size());
  for (const DatasetShard& s : shards_) axpy(1.0, local_grad(loss_, s, w), sum);
  scale_inplace(sum, 1.0 / machines());
  return sum;
}

Vec Cluster::pooled_hessvec(const Vec& w, const Vec& v) const {
  check_dim(w);
  check_dim(v);
  Vec sum = zeros(w.size());
  for (const DatasetShard& s : shards_)
    axpy(1.0, local_hessvec(loss_, s, w, v), sum);
  scale_inplace(sum, 1.0 / machines());
  return sum;
}

double Cluster::hessian_similarity(const Vec& w, int iters) const {
  check_dim(w);
  if (iters < 1) throw std::invalid_argument("hessian_similarity: iters >= 1");
  record_diag("hessian_similarity");

  // symmetric difference operator A = f_0'' - f''
  const auto apply = [&](const Vec& v) {
    Vec av = local_hessvec(loss_, shards_.front(), w, v);
    axpy(-1.0, pooled_hessvec(w, v), av);
    return av;
  };

  Rng rng(0x5eedu);
  Vec v(dim_);
  for (double& vi : v) vi = rng.normal();
  scale_inplace(v, 1.0 / norm2(v));

  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec av = apply(v);
    const double nrm = norm2(av);
    if (nrm <= 1e-300) return 0.0;
    estimate = nrm;  // nondecreasing in it for symmetric A
    scale_inplace(av, 1.0 / nrm);
    v = std::move(av);
  }
  return estimate;
}

}  // namespace disco
