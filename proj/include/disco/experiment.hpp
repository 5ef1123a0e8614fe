#ifndef DISCO_EXPERIMENT_HPP
#define DISCO_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "disco/losses.hpp"
#include "disco/solvers.hpp"

namespace disco {

// Plain-text experiment config: one `key = value` per line, `#` comments.
// Key reference lives in the README; unknown keys are an error.
struct ExperimentConfig {
  // data
  std::string data = "synthetic";  // synthetic | libsvm
  std::string path;                // libsvm file
  int n = 512;
  int d = 50;
  double noise = 0.1;
  std::uint64_t seed = 1;
  bool normalize = true;

  // loss
  std::string loss = "logistic";  // logistic | quadratic | smoothed_hinge
  double hinge_p = 3.0;
  double gamma = 1e-3;
  std::string eta_mode = "one";  // one | theory

  // cluster / algorithms
  std::vector<int> machines = {4};
  std::vector<std::string> algorithms = {"disco"};
  double epsilon = 1e-9;
  double target_gap = 1e-6;
  std::int64_t max_rounds = 2000;
  int max_outer = 200;
  std::string tolerance = "practical";  // practical | linear | superlinear
  double practical_c = 0.1;
  double beta = 1.0 / 20.0;
  double mu = 0.0;
  double mu0 = 1e-4;
  std::string rho = "0";  // numeric or "auto" (sqrt(6) G / (sqrt(n) D), D = 1)
  double dane_mu = 0.0;
  int lbfgs_memory = 30;
  std::string gd_step = "fixed";  // fixed | backtracking
  double sigma = 0.0;             // l1 weight for disco-composite

  // mu-sensitivity sweep (emits sweep.csv when non-empty)
  std::vector<double> sweep_mu;
  std::int64_t sweep_rounds = 40;
  std::vector<std::string> sweep_algorithms = {"disco", "dane"};
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentResult {
  std::vector<std::string> trace_files;
  std::string summary_file;
  std::string sweep_file;  // empty unless a sweep ran
};

// Runs every (algorithm, m) cell on a fresh cluster, writes one CSV per cell
// plus summary.md and manifest.json into out_dir (created if missing). The
// reference minimizer is computed once per (dataset, m) and shared.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir);

// Rebuilds the rounds-to-target table from the trace CSVs in a directory.
std::string summarize(const std::string& dir, double target_gap);
std::string summarize(const std::string& dir);  // target from manifest.json

// Renders gap-versus-rounds curves for every trace CSV into one SVG.
std::string plot(const std::string& dir, const std::string& out_file = "");

}  // namespace disco

#endif
