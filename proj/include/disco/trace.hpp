#ifndef DISCO_TRACE_HPP
#define DISCO_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "disco/vec.hpp"

namespace disco {

// One outer iteration. `rounds` is the communication-round count at the
// moment w_k became available (so a row reads "after `rounds` rounds the
// iterate had these values"); delta/pcg_iters/mu describe the step taken
// FROM w_k. The terminal row carries the output point with pcg_iters = 0.
struct TraceRow {
  int k = 0;
  std::int64_t rounds = 0;
  double f = 0.0;          // scaled objective f(w_k)
  double ell = 0.0;        // unscaled ell(w_k) = f / eta
  double grad_norm = 0.0;  // ||f'(w_k)||
  double delta = 0.0;
  int pcg_iters = 0;
  double mu = 0.0;
  double F = std::numeric_limits<double>::quiet_NaN();   // composite objective
  double l1 = std::numeric_limits<double>::quiet_NaN();  // ||w_k||_1
};

enum class RunStatus {
  Converged,
  MaxOuterExceeded,
  MaxRoundsExceeded,
  Diverged,
  Failed,
};

const char* to_string(RunStatus s);

struct NewtonTrace {
  std::string algorithm;
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::Failed;
  Vec w_final;
  bool composite = false;

  // Reference values for gap columns; NaN = unknown (raw values emitted).
  double ell_star = std::numeric_limits<double>::quiet_NaN();
  double F_star = std::numeric_limits<double>::quiet_NaN();

  // Filled when SolverConfig.record_iterates is set: w_k per row.
  std::vector<Vec> iterates;

  // Columns: k,rounds,f,ell_gap,grad_norm,delta,pcg_iters,mu and, for
  // composite runs, F_gap,l1 appended. Gap columns fall back to raw values
  // when the reference is NaN.
  void to_csv(std::ostream& out) const;
  std::string to_csv() const;

  // Smallest `rounds` at which ell_gap <= target, or -1 if never reached.
  std::int64_t rounds_to_gap(double target) const;

  std::int64_t total_rounds() const { return rows.empty() ? 0 : rows.back().rounds; }
};

// Reads back the CSV schema above (used by `summarize` and `plot`).
struct ParsedTrace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 if absent
};
ParsedTrace parse_trace_csv(std::istream& in);

}  // namespace disco

#endif
