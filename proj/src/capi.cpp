#include "disco.h"

#include <cstring>
#include <fstream>
#include <string>

#include "disco/baselines.hpp"
#include "disco/composite.hpp"
#include "disco/dataset.hpp"
#include "disco/errors.hpp"
#include "disco/experiment.hpp"
#include "disco/localsolve.hpp"
#include "disco/solvers.hpp"

struct disco_dataset {
  disco::Dataset data;
};

struct disco_cluster {
  disco::Cluster cluster;
};

struct disco_trace {
  disco::NewtonTrace trace;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
disco_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const disco::ParseError& e) {
    set_error(e.what());
    return DISCO_ERR_PARSE;
  } catch (const disco::DimensionError& e) {
    set_error(e.what());
    return DISCO_ERR_DIM_MISMATCH;
  } catch (const disco::SolveError& e) {
    set_error(e.what());
    return DISCO_ERR_NO_CONVERGENCE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return DISCO_ERR_INVALID_ARG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return DISCO_ERR_INTERNAL;
  }
}

disco::RegularizedLoss make_loss(const disco_loss_spec& spec) {
  disco::RegularizedLoss rl;
  switch (spec.kind) {
    case DISCO_LOSS_QUADRATIC: rl.loss.kind = disco::LossKind::Quadratic; break;
    case DISCO_LOSS_LOGISTIC: rl.loss.kind = disco::LossKind::Logistic; break;
    case DISCO_LOSS_SMOOTHED_HINGE:
      rl.loss.kind = disco::LossKind::SmoothedHinge;
      rl.loss.p = spec.p;
      break;
    default: throw std::invalid_argument("unknown loss kind");
  }
  if (spec.gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");
  rl.gamma = spec.gamma;
  rl.eta = spec.eta;
  return rl;
}

}  // namespace

extern "C" {

const char* disco_last_error(void) { return g_last_error.c_str(); }

disco_status disco_dataset_parse_libsvm(const char* text, disco_dataset** out) {
  return guarded([&]() {
    if (!text || !out) throw std::invalid_argument("null argument");
    *out = new disco_dataset{disco::parse_libsvm(std::string(text))};
    return DISCO_OK;
  });
}

disco_status disco_dataset_parse_libsvm_file(const char* path,
                                             disco_dataset** out) {
  return guarded([&]() {
    if (!path || !out) throw std::invalid_argument("null argument");
    std::ifstream in(path);
    if (!in) {
      set_error(std::string("cannot open '") + path + "'");
      return DISCO_ERR_IO;
    }
    *out = new disco_dataset{disco::parse_libsvm(in)};
    return DISCO_OK;
  });
}

disco_status disco_dataset_synth_classification(int64_t n, int d, uint64_t seed,
                                                double noise,
                                                disco_dataset** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    *out = new disco_dataset{
        disco::synth_classification(static_cast<int>(n), d, seed, noise)};
    return DISCO_OK;
  });
}

disco_status disco_dataset_normalize_rows(disco_dataset* ds) {
  return guarded([&]() {
    if (!ds) throw std::invalid_argument("null dataset");
    ds->data = disco::normalize_rows(std::move(ds->data));
    return DISCO_OK;
  });
}

int64_t disco_dataset_size(const disco_dataset* ds) {
  return ds ? static_cast<int64_t>(ds->data.size()) : 0;
}

int disco_dataset_dim(const disco_dataset* ds) { return ds ? ds->data.dim : 0; }

void disco_dataset_free(disco_dataset* ds) { delete ds; }

disco_status disco_cluster_create(const disco_dataset* ds, int m, uint64_t seed,
                                  const disco_loss_spec* loss,
                                  disco_cluster** out) {
  return guarded([&]() {
    if (!ds || !loss || !out) throw std::invalid_argument("null argument");
    disco::RegularizedLoss rl = make_loss(*loss);
    rl.B = std::max(1e-12, disco::max_row_norm(ds->data));
    if (rl.eta <= 0.0)
      rl.eta = disco::standard_scaling(
          disco::self_concordance_parameter(rl.loss, rl.B, rl.gamma));
    *out = new disco_cluster{
        disco::Cluster(disco::shard(ds->data, m, seed), rl)};
    return DISCO_OK;
  });
}

int disco_cluster_machines(const disco_cluster* c) {
  return c ? c->cluster.machines() : 0;
}

int disco_cluster_dim(const disco_cluster* c) { return c ? c->cluster.dim() : 0; }

int64_t disco_cluster_rounds(const disco_cluster* c) {
  return c ? c->cluster.rounds() : 0;
}

disco_status disco_cluster_write_ledger_csv(const disco_cluster* c,
                                            const char* path) {
  return guarded([&]() {
    if (!c || !path) throw std::invalid_argument("null argument");
    std::ofstream out(path);
    if (!out) {
      set_error(std::string("cannot write '") + path + "'");
      return DISCO_ERR_IO;
    }
    c->cluster.ledger().to_csv(out);
    return DISCO_OK;
  });
}

void disco_cluster_free(disco_cluster* c) { delete c; }

void disco_solver_spec_init(disco_solver_spec* spec, disco_algorithm alg) {
  if (!spec) return;
  std::memset(spec, 0, sizeof(*spec));
  spec->algorithm = alg;
  spec->epsilon = 1e-8;
  spec->tolerance_mode = DISCO_TOL_PRACTICAL;
  spec->zero_init = (alg == DISCO_ALG_DISCO_COMPOSITE) ? 1 : 0;
}

disco_status disco_run(disco_cluster* c, const disco_solver_spec* spec,
                       disco_trace** out) {
  return guarded([&]() {
    if (!c || !spec || !out) throw std::invalid_argument("null argument");

    disco::SolverConfig sc;
    sc.epsilon = spec->epsilon;
    if (spec->beta > 0.0) sc.beta = spec->beta;
    sc.mu = spec->mu;
    if (spec->mu0 > 0.0) sc.mu0 = spec->mu0;
    sc.rho = spec->rho;
    if (spec->max_outer > 0) sc.max_outer = spec->max_outer;
    if (spec->max_rounds > 0) sc.max_rounds = spec->max_rounds;
    if (spec->practical_c > 0.0) sc.practical_c = spec->practical_c;
    switch (spec->tolerance_mode) {
      case DISCO_TOL_LINEAR: sc.tolerance_mode = disco::ToleranceMode::Linear; break;
      case DISCO_TOL_SUPERLINEAR:
        sc.tolerance_mode = disco::ToleranceMode::Superlinear;
        break;
      case DISCO_TOL_PRACTICAL:
        sc.tolerance_mode = disco::ToleranceMode::Practical;
        break;
      default: throw std::invalid_argument("unknown tolerance mode");
    }
    if (spec->zero_init) sc.init = disco::InitMode::Zero;

    disco::BaselineConfig bc;
    bc.epsilon = spec->epsilon;
    bc.max_rounds = spec->max_rounds > 0 ? spec->max_rounds : 1000;

    disco::NewtonTrace trace;
    switch (spec->algorithm) {
      case DISCO_ALG_DISCO: trace = disco::run_disco(c->cluster, sc); break;
      case DISCO_ALG_ADAPTIVE_DISCO:
        trace = disco::run_adaptive_disco(c->cluster, sc);
        break;
      case DISCO_ALG_SIMPLE_DISCO:
        trace = disco::run_disco_simple(c->cluster, sc);
        break;
      case DISCO_ALG_GD:
        trace = disco::run_gd(c->cluster, disco::GdStepPolicy::FixedInverseL, bc);
        break;
      case DISCO_ALG_AFG: trace = disco::run_afg(c->cluster, bc); break;
      case DISCO_ALG_LBFGS:
        trace = disco::run_lbfgs(
            c->cluster, spec->lbfgs_memory > 0 ? spec->lbfgs_memory : 30, bc);
        break;
      case DISCO_ALG_DANE: trace = disco::run_dane(c->cluster, spec->mu, bc); break;
      case DISCO_ALG_DISCO_COMPOSITE: {
        disco::Psi psi;
        psi.kind = disco::Psi::Kind::L1;
        psi.sigma = spec->sigma;
        trace = disco::run_disco_composite(c->cluster, sc, psi);
        break;
      }
      default: throw std::invalid_argument("unknown algorithm");
    }
    *out = new disco_trace{std::move(trace)};
    return DISCO_OK;
  });
}

int64_t disco_trace_num_rows(const disco_trace* t) {
  return t ? static_cast<int64_t>(t->trace.rows.size()) : 0;
}

disco_status disco_trace_row(const disco_trace* t, int64_t i, double out[8]) {
  return guarded([&]() {
    if (!t || !out || i < 0 || i >= static_cast<int64_t>(t->trace.rows.size()))
      throw std::invalid_argument("bad trace row index");
    const disco::TraceRow& r = t->trace.rows[i];
    out[0] = r.k;
    out[1] = static_cast<double>(r.rounds);
    out[2] = r.f;
    out[3] = r.ell;
    out[4] = r.grad_norm;
    out[5] = r.delta;
    out[6] = r.pcg_iters;
    out[7] = r.mu;
    return DISCO_OK;
  });
}

disco_status disco_trace_final(const disco_trace* t, double* f_final, double* w,
                               size_t w_len) {
  return guarded([&]() {
    if (!t) throw std::invalid_argument("null trace");
    if (f_final)
      *f_final = t->trace.rows.empty() ? 0.0 : t->trace.rows.back().f;
    if (w) {
      if (w_len < t->trace.w_final.size())
        throw std::invalid_argument("w buffer too small");
      std::memcpy(w, t->trace.w_final.data(),
                  t->trace.w_final.size() * sizeof(double));
    }
    return DISCO_OK;
  });
}

const char* disco_trace_status(const disco_trace* t) {
  return t ? disco::to_string(t->trace.status) : "null";
}

void disco_trace_set_reference(disco_trace* t, double ell_star) {
  if (t) t->trace.ell_star = ell_star;
}

disco_status disco_trace_write_csv(const disco_trace* t, const char* path) {
  return guarded([&]() {
    if (!t || !path) throw std::invalid_argument("null argument");
    std::ofstream out(path);
    if (!out) {
      set_error(std::string("cannot write '") + path + "'");
      return DISCO_ERR_IO;
    }
    t->trace.to_csv(out);
    return DISCO_OK;
  });
}

void disco_trace_free(disco_trace* t) { delete t; }

disco_status disco_reference_gap(const disco_cluster* c, double* ell_star) {
  return guarded([&]() {
    if (!c || !ell_star) throw std::invalid_argument("null argument");
    const disco::Vec wstar = disco::centralized_minimizer(c->cluster, 1e-12);
    *ell_star = c->cluster.objective_unscaled(wstar);
    return DISCO_OK;
  });
}

disco_status disco_run_experiment(const char* config_path, const char* out_dir) {
  return guarded([&]() {
    if (!config_path || !out_dir) throw std::invalid_argument("null argument");
    disco::run_experiment(disco::load_experiment_config(config_path), out_dir);
    return DISCO_OK;
  });
}

disco_status disco_summarize(const char* dir, char* buf, size_t buf_len) {
  return guarded([&]() {
    if (!dir || !buf || buf_len == 0) throw std::invalid_argument("null argument");
    const std::string summary = disco::summarize(dir);
    if (summary.size() + 1 > buf_len) {
      set_error("summary buffer too small; need " +
                std::to_string(summary.size() + 1) + " bytes");
      return DISCO_ERR_INVALID_ARG;
    }
    std::memcpy(buf, summary.c_str(), summary.size() + 1);
    return DISCO_OK;
  });
}

disco_status disco_plot(const char* dir, const char* out_svg) {
  return guarded([&]() {
    if (!dir) throw std::invalid_argument("null argument");
    disco::plot(dir, out_svg ? out_svg : "");
    return DISCO_OK;
  });
}

}  // extern "C"
