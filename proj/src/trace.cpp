#include "disco/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace disco {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxOuterExceeded: return "max_outer_exceeded";
    case RunStatus::MaxRoundsExceeded: return "max_rounds_exceeded";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Failed: return "failed";
  }
  return "unknown";
}

void NewtonTrace::to_csv(std::ostream& out) const {
  out << "k,rounds,f,ell_gap,grad_norm,delta,pcg_iters,mu";
  if (composite) out << ",F_gap,l1";
  out << '\n';
  for (const TraceRow& r : rows) {
    const double ell_gap = std::isnan(ell_star) ? r.ell : r.ell - ell_star;
    out << r.k << ',' << r.rounds << ',' << fmt(r.f) << ',' << fmt(ell_gap)
        << ',' << fmt(r.grad_norm) << ',' << fmt(r.delta) << ',' << r.pcg_iters
        << ',' << fmt(r.mu);
    if (composite) {
      const double f_gap = std::isnan(F_star) ? r.F : r.F - F_star;
      out << ',' << fmt(f_gap) << ',' << fmt(r.l1);
    }
    out << '\n';
  }
}

std::string NewtonTrace::to_csv() const {
  std::ostringstream out;
  to_csv(out);
  return out.str();
}

std::int64_t NewtonTrace::rounds_to_gap(double target) const {
  if (std::isnan(ell_star)) return -1;
  for (const TraceRow& r : rows)
    if (r.ell - ell_star <= target) return r.rounds;
  return -1;
}

int ParsedTrace::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

ParsedTrace parse_trace_csv(std::istream& in) {
  ParsedTrace t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.columns.size())
      throw std::runtime_error("trace CSV: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace disco
