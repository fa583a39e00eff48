#include "coarsening/coarsening.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "asep.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "fredholm.hpp"
#include "glauber.hpp"
#include "rate_function.hpp"
#include "rng.hpp"

struct cl_result {
  coarsening::ExperimentResult result;
  std::string csv;
  std::string sidecar;
};

struct cl_glauber {
  coarsening::GlauberSim sim;
};

struct cl_asep {
  coarsening::AsepSim sim;
};

namespace {

thread_local std::string last_error;

template <class F>
cl_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CL_OK;
  } catch (const coarsening::InputError& e) {
    last_error = e.what();
    return CL_ERR_INVALID;
  } catch (const coarsening::WorkloadError& e) {
    last_error = e.what();
    return CL_ERR_WORKLOAD;
  } catch (const coarsening::ResidueError& e) {
    last_error = e.what();
    return CL_ERR_RESIDUE;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("configuration: ") + e.what();
    return CL_ERR_INVALID;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CL_ERR_INTERNAL;
  }
}

void require_ptr(const void* p, const char* what) {
  if (p == nullptr) throw coarsening::InputError(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* cl_last_error(void) { return last_error.c_str(); }
const char* cl_version(void) { return "0.1.0"; }
const char* cl_seed_rule(void) { return coarsening::kSeedDerivationRule; }

size_t cl_experiment_count(void) { return coarsening::experiment_names().size(); }

const char* cl_experiment_name(size_t index) {
  const auto& names = coarsening::experiment_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

cl_status cl_default_config(const char* experiment, char** json_out) {
  return guarded([&] {
    require_ptr(experiment, "experiment");
    require_ptr(json_out, "json_out");
    *json_out = dup_string(coarsening::default_config(experiment).dump(2) + "\n");
  });
}

void cl_string_free(char* s) { std::free(s); }

cl_status cl_run_experiment(const char* experiment, const char* config_json,
                            const cl_run_options* options, cl_result** out) {
  return guarded([&] {
    require_ptr(experiment, "experiment");
    require_ptr(out, "out");
    *out = nullptr;
    coarsening::json config;
    if (config_json != nullptr) config = coarsening::json::parse(config_json);
    coarsening::RunOptions opts;
    if (options != nullptr) {
      if (options->threads > 0) opts.threads = options->threads;
      if (options->has_seed) opts.seed = options->seed;
      if (options->has_replicas) opts.replicas = options->replicas;
    }
    auto r = std::make_unique<cl_result>();
    r->result = coarsening::run_experiment(experiment, config, opts);
    r->csv = r->result.csv();
    r->sidecar = r->result.sidecar().dump(2) + "\n";
    *out = r.release();
  });
}

const char* cl_result_csv(const cl_result* r) { return r == nullptr ? "" : r->csv.c_str(); }
const char* cl_result_sidecar(const cl_result* r) { return r == nullptr ? "" : r->sidecar.c_str(); }

cl_status cl_result_write(const cl_result* r, const char* csv_path) {
  return guarded([&] {
    require_ptr(r, "result");
    require_ptr(csv_path, "csv_path");
    coarsening::write_result(r->result, csv_path);
  });
}

void cl_result_free(cl_result* r) { delete r; }

cl_status cl_glauber_create(const char* config_text, double q, uint64_t seed, cl_glauber** out) {
  return guarded([&] {
    require_ptr(config_text, "config_text");
    require_ptr(out, "out");
    *out = nullptr;
    COARSENING_REQUIRE(q >= 0.0 && q <= 1.0, "q must lie in [0,1]");
    *out = new cl_glauber{coarsening::GlauberSim(coarsening::SpinConfig::from_text(config_text), q, seed)};
  });
}

cl_status cl_glauber_evolve(cl_glauber* g, double t) {
  return guarded([&] {
    require_ptr(g, "handle");
    g->sim.evolve_until(t);
  });
}

double cl_glauber_time(const cl_glauber* g) { return g == nullptr ? 0.0 : g->sim.clock_time(); }
uint64_t cl_glauber_events(const cl_glauber* g) { return g == nullptr ? 0 : g->sim.event_count(); }
size_t cl_glauber_size(const cl_glauber* g) { return g == nullptr ? 0 : g->sim.config().size(); }

cl_status cl_glauber_spin(const cl_glauber* g, size_t site, int* out) {
  return guarded([&] {
    require_ptr(g, "handle");
    require_ptr(out, "out");
    COARSENING_REQUIRE(site < g->sim.config().size(), "site outside the box");
    *out = g->sim.config().spin(site);
  });
}

cl_status cl_glauber_config(const cl_glauber* g, char** text_out) {
  return guarded([&] {
    require_ptr(g, "handle");
    require_ptr(text_out, "text_out");
    *text_out = dup_string(g->sim.config().to_text());
  });
}

void cl_glauber_free(cl_glauber* g) { delete g; }

cl_status cl_asep_create_step(size_t M, double q, uint64_t seed, cl_asep** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = nullptr;
    *out = new cl_asep{coarsening::AsepSim(coarsening::step_initial(M), q, seed)};
  });
}

cl_status cl_asep_evolve(cl_asep* a, double t) {
  return guarded([&] {
    require_ptr(a, "handle");
    a->sim.evolve_until(t);
  });
}

size_t cl_asep_size(const cl_asep* a) { return a == nullptr ? 0 : a->sim.state().size(); }

cl_status cl_asep_position(const cl_asep* a, size_t index, int64_t* out) {
  return guarded([&] {
    require_ptr(a, "handle");
    require_ptr(out, "out");
    COARSENING_REQUIRE(index < a->sim.state().size(), "particle index out of range");
    *out = a->sim.state().positions[index];
  });
}

size_t cl_asep_current(const cl_asep* a) { return a == nullptr ? 0 : coarsening::current_h0(a->sim.state()); }

void cl_asep_free(cl_asep* a) { delete a; }

cl_status cl_phi_plus(double eps, double q, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = coarsening::phi_plus(eps, coarsening::RateParams::from_q(q));
  });
}

cl_status cl_prob_xm_positive(int m, double t, double q, int N_zeta, int N_eta, int N_mu, int n_max,
                              double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    const auto params = coarsening::RateParams::from_q(q);
    auto quad = coarsening::QuadratureSpec::defaults(params);
    if (N_zeta > 0) quad.N_zeta = N_zeta;
    if (N_eta > 0) quad.N_eta = N_eta;
    if (N_mu > 0) quad.N_mu = N_mu;
    if (n_max > 0) quad.n_max = n_max;
    *out = coarsening::prob_xm_positive(m, t, params, quad).probability;
  });
}

}  // extern "C"
