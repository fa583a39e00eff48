#ifndef COARSENING_COARSENING_H
#define COARSENING_COARSENING_H

#include <stddef.h>
#include <stdint.h>

#if defined(COARSENING_BUILDING_LIBRARY)
#define CL_API __attribute__((visibility("default")))
#else
#define CL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum cl_status {
  CL_OK = 0,
  CL_ERR_INVALID = 2,  /* precondition violated */
  CL_ERR_WORKLOAD = 3, /* refused by a work budget */
  CL_ERR_RESIDUE = 4,  /* contour integral failed its reality check */
  CL_ERR_INTERNAL = 5
} cl_status;

typedef struct cl_result cl_result;
typedef struct cl_glauber cl_glauber;
typedef struct cl_asep cl_asep;

typedef struct cl_run_options {
  unsigned threads; /* 0 keeps the configured value */
  int has_seed;
  uint64_t seed;
  int has_replicas;
  uint64_t replicas;
} cl_run_options;

/* Message of the last failed call on this thread; never NULL. */
CL_API const char* cl_last_error(void);
CL_API const char* cl_version(void);
CL_API const char* cl_seed_rule(void);

CL_API size_t cl_experiment_count(void);
CL_API const char* cl_experiment_name(size_t index);

/* Annotated default configuration as JSON text. Release with cl_string_free. */
CL_API cl_status cl_default_config(const char* experiment, char** json_out);
CL_API void cl_string_free(char* s);

/* config_json may be NULL for defaults; options may be NULL. */
CL_API cl_status cl_run_experiment(const char* experiment, const char* config_json,
                                   const cl_run_options* options, cl_result** out);
CL_API const char* cl_result_csv(const cl_result* r);
CL_API const char* cl_result_sidecar(const cl_result* r);
/* Writes the CSV to path and the sidecar to path + ".json". */
CL_API cl_status cl_result_write(const cl_result* r, const char* csv_path);
CL_API void cl_result_free(cl_result* r);

/* Glauber dynamics from a configuration in the text format
 * "d=<d> sides=<n1,...> boundary=<kind>" followed by rows of '+'/'-'. */
CL_API cl_status cl_glauber_create(const char* config_text, double q, uint64_t seed, cl_glauber** out);
CL_API cl_status cl_glauber_evolve(cl_glauber* g, double t);
CL_API double cl_glauber_time(const cl_glauber* g);
CL_API uint64_t cl_glauber_events(const cl_glauber* g);
CL_API size_t cl_glauber_size(const cl_glauber* g);
CL_API cl_status cl_glauber_spin(const cl_glauber* g, size_t site, int* out);
CL_API cl_status cl_glauber_config(const cl_glauber* g, char** text_out);
CL_API void cl_glauber_free(cl_glauber* g);

/* ASEP from the step initial condition with M particles. */
CL_API cl_status cl_asep_create_step(size_t M, double q, uint64_t seed, cl_asep** out);
CL_API cl_status cl_asep_evolve(cl_asep* a, double t);
CL_API size_t cl_asep_size(const cl_asep* a);
CL_API cl_status cl_asep_position(const cl_asep* a, size_t index, int64_t* out);
CL_API size_t cl_asep_current(const cl_asep* a);
CL_API void cl_asep_free(cl_asep* a);

CL_API cl_status cl_phi_plus(double eps, double q, double* out);
/* P(x_m(t / (2q - 1)) > 0) by the Fredholm formula. Zero quadrature sizes
 * select the defaults. */
CL_API cl_status cl_prob_xm_positive(int m, double t, double q, int N_zeta, int N_eta, int N_mu,
                                     int n_max, double* out);

#ifdef __cplusplus
}
#endif

#endif
