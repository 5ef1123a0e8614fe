#include "disco/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <tuple>

#include "disco/baselines.hpp"
#include "disco/composite.hpp"
#include "disco/dataset.hpp"
#include "disco/localsolve.hpp"

namespace disco {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size())
    throw std::runtime_error("config: bad number for '" + key + "': " + v);
  return x;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

Loss loss_from_config(const ExperimentConfig& cfg) {
  if (cfg.loss == "logistic") return {LossKind::Logistic, 0.0};
  if (cfg.loss == "quadratic") return {LossKind::Quadratic, 0.0};
  if (cfg.loss == "smoothed_hinge") return {LossKind::SmoothedHinge, cfg.hinge_p};
  throw std::runtime_error("config: unknown loss '" + cfg.loss + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "data") cfg.data = val;
    else if (key == "path") cfg.path = val;
    else if (key == "n") cfg.n = static_cast<int>(to_double(key, val));
    else if (key == "d") cfg.d = static_cast<int>(to_double(key, val));
    else if (key == "noise") cfg.noise = to_double(key, val);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(key, val));
    else if (key == "normalize") cfg.normalize = (val == "true" || val == "1");
    else if (key == "loss") cfg.loss = val;
    else if (key == "hinge_p") cfg.hinge_p = to_double(key, val);
    else if (key == "gamma") cfg.gamma = to_double(key, val);
    else if (key == "eta") cfg.eta_mode = val;
    else if (key == "machines") {
      cfg.machines.clear();
      for (const auto& s : split_list(val))
        cfg.machines.push_back(static_cast<int>(to_double(key, s)));
    } else if (key == "algorithms") cfg.algorithms = split_list(val);
    else if (key == "epsilon") cfg.epsilon = to_double(key, val);
    else if (key == "target_gap") cfg.target_gap = to_double(key, val);
    else if (key == "max_rounds") cfg.max_rounds = static_cast<std::int64_t>(to_double(key, val));
    else if (key == "max_outer") cfg.max_outer = static_cast<int>(to_double(key, val));
    else if (key == "tolerance") cfg.tolerance = val;
    else if (key == "practical_c") cfg.practical_c = to_double(key, val);
    else if (key == "beta") cfg.beta = to_double(key, val);
    else if (key == "mu") cfg.mu = to_double(key, val);
    else if (key == "mu0") cfg.mu0 = to_double(key, val);
    else if (key == "rho") cfg.rho = val;
    else if (key == "dane_mu") cfg.dane_mu = to_double(key, val);
    else if (key == "lbfgs_memory") cfg.lbfgs_memory = static_cast<int>(to_double(key, val));
    else if (key == "gd_step") cfg.gd_step = val;
    else if (key == "sigma") cfg.sigma = to_double(key, val);
    else if (key == "sweep_mu") {
      cfg.sweep_mu.clear();
      for (const auto& s : split_list(val)) cfg.sweep_mu.push_back(to_double(key, s));
    } else if (key == "sweep_rounds") cfg.sweep_rounds = static_cast<std::int64_t>(to_double(key, val));
    else if (key == "sweep_algorithms") cfg.sweep_algorithms = split_list(val);
    else throw std::runtime_error("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
  }
  if (cfg.machines.empty()) throw std::runtime_error("config: machines empty");
  for (int m : cfg.machines)
    if (m < 1) throw std::runtime_error("config: machines must be >= 1");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

namespace {

struct PreparedData {
  Dataset dataset;
  RegularizedLoss loss;
};

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData pd;
  if (cfg.data == "synthetic") {
    pd.dataset = synth_classification(cfg.n, cfg.d, cfg.seed, cfg.noise);
  } else if (cfg.data == "libsvm") {
    pd.dataset = parse_libsvm_file(cfg.path);
    // binarize: labels > 0 become +1, the rest -1 (Covtype-style files)
    if (cfg.loss != "quadratic")
      for (Example& ex : pd.dataset.examples) ex.label = ex.label > 0 ? 1.0 : -1.0;
  } else {
    throw std::runtime_error("config: unknown data '" + cfg.data + "'");
  }
  if (cfg.normalize) pd.dataset = normalize_rows(pd.dataset);

  pd.loss.loss = loss_from_config(cfg);
  pd.loss.gamma = cfg.gamma;
  pd.loss.B = std::max(1e-12, max_row_norm(pd.dataset));
  if (cfg.eta_mode == "theory") {
    pd.loss.eta = standard_scaling(
        self_concordance_parameter(pd.loss.loss, pd.loss.B, pd.loss.gamma));
  } else if (cfg.eta_mode == "one") {
    pd.loss.eta = 1.0;
  } else {
    throw std::runtime_error("config: eta must be 'one' or 'theory'");
  }
  return pd;
}

SolverConfig solver_config(const ExperimentConfig& cfg, const PreparedData& pd,
                           int m) {
  SolverConfig sc;
  sc.beta = cfg.beta;
  sc.mu = cfg.mu;
  sc.mu0 = cfg.mu0;
  sc.epsilon = cfg.epsilon;
  sc.max_outer = cfg.max_outer;
  sc.max_rounds = cfg.max_rounds;
  sc.practical_c = cfg.practical_c;
  if (cfg.tolerance == "practical") sc.tolerance_mode = ToleranceMode::Practical;
  else if (cfg.tolerance == "linear") sc.tolerance_mode = ToleranceMode::Linear;
  else if (cfg.tolerance == "superlinear") sc.tolerance_mode = ToleranceMode::Superlinear;
  else throw std::runtime_error("config: unknown tolerance '" + cfg.tolerance + "'");

  if (cfg.rho == "auto") {
    const SmoothnessConstants c = smoothness_constants(pd.loss);
    const double n_local =
        static_cast<double>(pd.dataset.size()) / std::max(1, m);
    sc.rho = rho_default(c.G, 1.0, std::max(1.0, n_local));
  } else {
    sc.rho = to_double("rho", cfg.rho);
  }
  return sc;
}

NewtonTrace run_cell(const ExperimentConfig& cfg, const PreparedData& pd,
                     Cluster& cluster, const std::string& algo, int m) {
  SolverConfig sc = solver_config(cfg, pd, m);
  BaselineConfig bc;
  bc.epsilon = cfg.epsilon;
  bc.max_rounds = cfg.max_rounds;

  if (algo == "disco") return run_disco(cluster, sc);
  if (algo == "adaptive-disco") return run_adaptive_disco(cluster, sc);
  if (algo == "simple-disco") return run_disco_simple(cluster, sc);
  if (algo == "disco-composite") {
    Psi psi;
    psi.kind = Psi::Kind::L1;
    psi.sigma = cfg.sigma;
    sc.init = InitMode::Zero;
    return run_disco_composite(cluster, sc, psi);
  }
  if (algo == "gd")
    return run_gd(cluster,
                  cfg.gd_step == "backtracking" ? GdStepPolicy::Backtracking
                                                : GdStepPolicy::FixedInverseL,
                  bc);
  if (algo == "afg") return run_afg(cluster, bc);
  if (algo == "lbfgs") return run_lbfgs(cluster, cfg.lbfgs_memory, bc);
  if (algo == "dane") return run_dane(cluster, cfg.dane_mu, bc);
  throw std::runtime_error("unknown algorithm '" + algo + "'");
}

std::string summary_table(
    const std::vector<std::tuple<std::string, int, std::int64_t>>& cells,
    double target) {
  std::ostringstream out;
  std::vector<std::string> algos;
  std::vector<int> ms;
  for (const auto& [a, m, r] : cells) {
    if (std::find(algos.begin(), algos.end(), a) == algos.end()) algos.push_back(a);
    if (std::find(ms.begin(), ms.end(), m) == ms.end()) ms.push_back(m);
  }
  std::sort(ms.begin(), ms.end());

  out << "| algorithm |";
  for (int m : ms) out << " m=" << m << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < ms.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& a : algos) {
    out << "| " << a << " |";
    for (int m : ms) {
      std::int64_t rounds = -1;
      for (const auto& [ca, cm, cr] : cells)
        if (ca == a && cm == m) rounds = cr;
      if (rounds < 0) out << " \xE2\x80\x94 |";  // em dash: target not reached
      else out << ' ' << rounds << " |";
    }
    out << '\n';
  }
  out << "\nRounds of communication to reach ell-gap <= " << fmt(target) << ".\n";
  return out.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  fs::create_directories(out_dir);
  const PreparedData pd = prepare_data(cfg);

  ExperimentResult result;
  std::vector<std::tuple<std::string, int, std::int64_t>> cells;
  std::map<int, double> ell_star_by_m;

  for (int m : cfg.machines) {
    if (static_cast<std::size_t>(m) > pd.dataset.size())
      throw std::runtime_error("config: m exceeds dataset size");
    auto shards = shard(pd.dataset, m, cfg.seed);

    // reference minimizer of this sharding's objective, shared by all cells
    Cluster ref_cluster(shards, pd.loss);
    const Vec wstar = centralized_minimizer(ref_cluster, 1e-12);
    const double ell_star = ref_cluster.objective_unscaled(wstar);
    ell_star_by_m[m] = ell_star;

    for (const std::string& algo : cfg.algorithms) {
      Cluster cluster(shards, pd.loss);
      NewtonTrace trace = run_cell(cfg, pd, cluster, algo, m);
      trace.ell_star = ell_star;
      if (trace.composite) {
        Psi psi;
        psi.sigma = cfg.sigma;
        const Vec wc = centralized_composite_minimizer(ref_cluster, psi);
        trace.F_star = ref_cluster.objective(wc) + psi.value(wc);
      }

      const std::string file =
          (fs::path(out_dir) / (algo + "_m" + std::to_string(m) + ".csv")).string();
      write_atomic(file, trace.to_csv());
      result.trace_files.push_back(file);
      cells.emplace_back(algo, m, trace.rounds_to_gap(cfg.target_gap));
    }
  }

  // optional mu-sensitivity sweep: gap after a fixed round budget per mu
  if (!cfg.sweep_mu.empty()) {
    std::ostringstream sweep;
    sweep << "algorithm,m,mu,gap_after_" << cfg.sweep_rounds << "_rounds\n";
    for (int m : cfg.machines) {
      auto shards = shard(pd.dataset, m, cfg.seed);
      for (const std::string& algo : cfg.sweep_algorithms) {
        for (double mu : cfg.sweep_mu) {
          Cluster cluster(shards, pd.loss);
          ExperimentConfig one = cfg;
          one.mu = mu;
          one.dane_mu = mu;
          one.max_rounds = cfg.sweep_rounds;
          one.epsilon = 1e-300;  // never stop early; exhaust the budget
          NewtonTrace trace = run_cell(one, pd, cluster, algo, m);
          const double gap =
              trace.rows.empty()
                  ? std::numeric_limits<double>::quiet_NaN()
                  : trace.rows.back().ell - ell_star_by_m.at(m);
          sweep << algo << ',' << m << ',' << fmt(mu) << ',' << fmt(gap) << '\n';
        }
      }
    }
    result.sweep_file = (fs::path(out_dir) / "sweep.csv").string();
    write_atomic(result.sweep_file, sweep.str());
  }

  json manifest;
  manifest["target_gap"] = cfg.target_gap;
  manifest["epsilon"] = cfg.epsilon;
  manifest["gamma"] = cfg.gamma;
  manifest["seed"] = cfg.seed;
  manifest["loss"] = cfg.loss;
  manifest["data"] = cfg.data;
  manifest["machines"] = cfg.machines;
  manifest["algorithms"] = cfg.algorithms;
  write_atomic((fs::path(out_dir) / "manifest.json").string(),
               manifest.dump(2) + "\n");

  result.summary_file = (fs::path(out_dir) / "summary.md").string();
  write_atomic(result.summary_file,
               "# Experiment summary\n\n" + summary_table(cells, cfg.target_gap));
  return result;
}

namespace {

struct TraceFile {
  std::string name;  // algo_mX
  ParsedTrace trace;
};

std::vector<TraceFile> load_traces(const std::string& dir) {
  std::vector<TraceFile> out;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() == ".csv" && name.find("_m") != std::string::npos &&
        name != "sweep.csv")
      paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p);
    out.push_back({p.stem().string(), parse_trace_csv(in)});
  }
  return out;
}

}  // namespace

std::string summarize(const std::string& dir, double target_gap) {
  std::vector<std::tuple<std::string, int, std::int64_t>> cells;
  for (const TraceFile& tf : load_traces(dir)) {
    const auto us = tf.name.rfind("_m");
    const std::string algo = tf.name.substr(0, us);
    const int m = std::atoi(tf.name.c_str() + us + 2);
    const int rc = tf.trace.column("rounds");
    const int gc = tf.trace.column("ell_gap");
    std::int64_t rounds = -1;
    for (const auto& row : tf.trace.rows)
      if (row[gc] <= target_gap) {
        rounds = static_cast<std::int64_t>(row[rc]);
        break;
      }
    cells.emplace_back(algo, m, rounds);
  }
  return "# Experiment summary\n\n" + summary_table(cells, target_gap);
}

std::string summarize(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in '" + dir + "'");
  json manifest = json::parse(in);
  return summarize(dir, manifest.at("target_gap").get<double>());
}

std::string plot(const std::string& dir, const std::string& out_file) {
  const auto traces = load_traces(dir);
  const double W = 720, H = 480, ml = 70, mr = 160, mt = 30, mb = 50;

  double max_rounds = 1;
  double min_gap = 1e300, max_gap = -1e300;
  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;  // (rounds, log10 gap)
  };
  std::vector<Series> series;
  for (const TraceFile& tf : traces) {
    const int rc = tf.trace.column("rounds");
    const int gc = tf.trace.column("ell_gap");
    if (rc < 0 || gc < 0) continue;
    Series s{tf.name, {}};
    for (const auto& row : tf.trace.rows) {
      if (!(row[gc] > 0.0)) continue;
      const double lg = std::log10(row[gc]);
      s.pts.emplace_back(row[rc], lg);
      max_rounds = std::max(max_rounds, row[rc]);
      min_gap = std::min(min_gap, lg);
      max_gap = std::max(max_gap, lg);
    }
    if (!s.pts.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) throw std::runtime_error("plot: no usable traces in '" + dir + "'");
  if (max_gap - min_gap < 1e-9) max_gap = min_gap + 1.0;

  const auto X = [&](double r) { return ml + (W - ml - mr) * r / max_rounds; };
  const auto Y = [&](double lg) {
    return mt + (H - mt - mb) * (max_gap - lg) / (max_gap - min_gap);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
      << H << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
      << "' y2='" << H - mb << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << H - mb << "' stroke='black'/>\n";
  svg << "<text x='" << (ml + (W - ml - mr) / 2) << "' y='" << H - 12
      << "' text-anchor='middle' font-size='13'>communication rounds</text>\n";
  svg << "<text x='18' y='" << (mt + (H - mt - mb) / 2)
      << "' font-size='13' transform='rotate(-90 18 " << (mt + (H - mt - mb) / 2)
      << ")' text-anchor='middle'>log10(ell gap)</text>\n";
  for (int g = 0; g <= 4; ++g) {  // y gridline labels
    const double lg = min_gap + (max_gap - min_gap) * g / 4.0;
    svg << "<text x='" << ml - 8 << "' y='" << Y(lg) + 4
        << "' text-anchor='end' font-size='11'>" << static_cast<int>(lg)
        << "</text>\n";
    const double r = max_rounds * g / 4.0;
    svg << "<text x='" << X(r) << "' y='" << H - mb + 16
        << "' text-anchor='middle' font-size='11'>" << static_cast<int>(r)
        << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    svg << "<polyline fill='none' stroke='" << colors[i % 8]
        << "' stroke-width='1.5' points='";
    for (const auto& [r, lg] : series[i].pts) svg << X(r) << ',' << Y(lg) << ' ';
    svg << "'/>\n";
    svg << "<text x='" << W - mr + 10 << "' y='" << mt + 16 * (i + 1)
        << "' font-size='12' fill='" << colors[i % 8] << "'>" << series[i].name
        << "</text>\n";
  }
  svg << "</svg>\n";

  const std::string path =
      out_file.empty() ? (fs::path(dir) / "plot.svg").string() : out_file;
  write_atomic(path, svg.str());
  return path;
}

}  // namespace disco
