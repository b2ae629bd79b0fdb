// Copyright 2026 The bgklab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BGK_BGK_H
#define BGK_BGK_H

#include <stddef.h>
#include <stdint.h>

#if defined(BGK_BUILDING_LIBRARY)
#define BGK_API __attribute__((visibility("default")))
#else
#define BGK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/** Status codes returned by every fallible call. */
typedef enum bgk_status {
    BGK_OK = 0,
    BGK_ERR_INVALID_INPUT = 1,
    BGK_ERR_DEGENERATE = 2,
    BGK_ERR_NO_SCALE = 3,
    BGK_ERR_OUT_OF_RANGE = 4,
    BGK_ERR_INSTABILITY = 5,
    BGK_ERR_PRECONDITION = 6,
    BGK_ERR_IO = 7,
    BGK_ERR_INTERNAL = 8,
    BGK_ERR_NULL_ARGUMENT = 9
} bgk_status;

/** Message of the last failure on the calling thread ("" if none). */
BGK_API const char* bgk_last_error(void);
BGK_API const char* bgk_status_string(bgk_status status);
BGK_API const char* bgk_version(void);
/** Frees strings returned through char** out-parameters. */
BGK_API void bgk_string_free(char* s);

/* Random streams */
typedef struct bgk_rng bgk_rng;
BGK_API bgk_status bgk_rng_create(uint64_t seed, bgk_rng** out);
BGK_API bgk_status bgk_rng_split(const bgk_rng* rng, uint64_t index, bgk_rng** out);
BGK_API void bgk_rng_destroy(bgk_rng* rng);
BGK_API bgk_status bgk_rng_uniform(bgk_rng* rng, double* out);
BGK_API bgk_status bgk_rng_normal(bgk_rng* rng, double* out);

/* Smearing kernel */
typedef struct bgk_kernel bgk_kernel;
typedef struct bgk_kernel_info {
    double epsilon;
    int dim;
    double phi0;
    double grad_bound;
    double support_radius;
    double normalization;
} bgk_kernel_info;

/** profile may be NULL for "bump". */
BGK_API bgk_status bgk_kernel_create(const char* profile, double epsilon, int dim, bgk_kernel** out);
BGK_API void bgk_kernel_destroy(bgk_kernel* k);
BGK_API bgk_status bgk_kernel_get_info(const bgk_kernel* k, bgk_kernel_info* out);
/** phi at the torus point x (dim coordinates, wrapped internally). */
BGK_API bgk_status bgk_kernel_eval(const bgk_kernel* k, const double* x, double* out);
BGK_API bgk_status bgk_kernel_sample(const bgk_kernel* k, bgk_rng* rng, double* xi_out);
BGK_API bgk_status bgk_partition_scale(const bgk_kernel* k, double* r_out);

/* Torus */
BGK_API bgk_status bgk_torus_distance(int dim, const double* a, const double* b, double* out);

/* Maxwellians */
BGK_API bgk_status bgk_maxwellian_pdf(int dim, const double* u, double T, const double* v, double* out);
BGK_API bgk_status bgk_w2_maxwellians(int dim, const double* u1, double T1, const double* u2, double T2, double* out);
BGK_API bgk_status bgk_coupled_maxwellian_sample(bgk_rng* rng, int dim, const double* u1, double T1,
                                                 const double* u2, double T2, double* v_out, double* w_out);

/* Particle configurations */
typedef struct bgk_particles bgk_particles;
/** x and v hold n*dim doubles, particle-major; positions are wrapped onto [-1/2, 1/2). */
BGK_API bgk_status bgk_particles_create(int dim, size_t n, const double* x, const double* v, bgk_particles** out);
/** n draws from (1 + a cos(2 pi x_1)) M_{u0,T0}(v); u0 may be NULL for zero. */
BGK_API bgk_status bgk_particles_sample_initial(int dim, size_t n, double a, double T0, const double* u0,
                                                bgk_rng* rng, bgk_particles** out);
BGK_API void bgk_particles_destroy(bgk_particles* p);
BGK_API bgk_status bgk_particles_size(const bgk_particles* p, size_t* n_out, int* dim_out);
BGK_API bgk_status bgk_particles_copy(const bgk_particles* p, double* x_out, double* v_out);
/** Smeared empirical fields at x; *defined is 0 where the smeared density vanishes. */
BGK_API bgk_status bgk_smeared_fields(const bgk_particles* p, const bgk_kernel* k, const double* x, double* rho,
                                      double* u_out, double* T, int* defined);
/** Advances the configuration by t_end with the exact jump process. */
BGK_API bgk_status bgk_simulate(bgk_particles* p, const bgk_kernel* k, double t_end, bgk_rng* rng, uint64_t* jumps);
/** Squared 2-Wasserstein distance of two equal-size clouds (n <= 4096). */
BGK_API bgk_status bgk_empirical_w2(const bgk_particles* a, const bgk_particles* b, double* out);

/* Kinetic grid solver */
typedef struct bgk_state bgk_state;
typedef struct bgk_global_moments {
    double mass;
    double momentum[3];
    double energy;
} bgk_global_moments;

/** vmax <= 0 selects the automatic box. */
BGK_API bgk_status bgk_state_initial(int dim, int nx, int nv, double vmax, double a, double T0, const double* u0,
                                     bgk_state** out);
BGK_API void bgk_state_destroy(bgk_state* s);
/** Advances the state by t_end in steps of dt; k == NULL solves the true BGK equation. */
BGK_API bgk_status bgk_state_solve(bgk_state* s, const bgk_kernel* k, double t_end, double dt);
BGK_API bgk_status bgk_state_time(const bgk_state* s, double* t_out);
BGK_API bgk_status bgk_state_values(const bgk_state* s, const double** values, size_t* count);
BGK_API bgk_status bgk_state_global_moments(const bgk_state* s, bgk_global_moments* out);
BGK_API bgk_status bgk_state_save(const bgk_state* s, const char* path);
BGK_API bgk_status bgk_state_load(const char* path, bgk_state** out);

/* Constants */
typedef struct bgk_constants {
    double phi0;
    double grad_bound;
    double r;
    double A;
    double A_phi;
    double M;
    double Gamma_phi;
    double N_phi;
} bgk_constants;

/** Partition scale from the kernel; M is the p = 4 cap supplied by the caller. */
BGK_API bgk_status bgk_constants_report(const bgk_kernel* k, double horizon, double C2, double M, bgk_constants* out);

/* Configuration-driven runs; config_json follows the documented RunConfig schema.
   On success *result_json receives a summary to release with bgk_string_free. */
BGK_API bgk_status bgk_run_chaos_sweep(const char* config_json, char** result_json);
BGK_API bgk_status bgk_run_cutoff_sweep(const char* config_json, char** result_json);
BGK_API bgk_status bgk_run_solve(const char* config_json, char** result_json);
BGK_API bgk_status bgk_run_simulate(const char* config_json, char** result_json);
/** Validates and normalizes a config; *normalized_json echoes it with defaults filled in. */
BGK_API bgk_status bgk_config_normalize(const char* config_json, char** normalized_json);

#ifdef __cplusplus
}
#endif

#endif
