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

#include "bgk/bgk.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <json.hpp>

#include "assignment.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "kernel.hpp"
#include "kinetic.hpp"
#include "maxwell.hpp"
#include "particle_system.hpp"
#include "rng.hpp"

struct bgk_rng {
    bgk::Rng rng;
};
struct bgk_kernel {
    bgk::SmearingKernel k;
};
struct bgk_particles {
    bgk::ParticleConfig cfg;
};
struct bgk_state {
    bgk::KineticState s;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

template <class F>
bgk_status guard(F&& body) {
    try {
        body();
        g_last_error.clear();
        return BGK_OK;
    } catch (const bgk::Error& e) {
        g_last_error = e.what();
        return static_cast<bgk_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return BGK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BGK_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return BGK_ERR_INTERNAL;
    }
}

bgk::Vec vec(int dim, const double* p) {
    bgk::check_dim(dim);
    bgk::Vec v(dim);
    if (p)
        for (int a = 0; a < dim; ++a) v[a] = p[a];
    return v;
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const bgk::LogLogFit& f) {
    return {{"slope", num(f.slope)},   {"intercept", num(f.intercept)}, {"slope_stderr", num(f.slope_stderr)},
            {"ci_low", num(f.ci_low)}, {"ci_high", num(f.ci_high)},     {"points", f.points}};
}

json direct_json(const bgk::DirectW2& d) {
    return {{"raw", num(d.raw)},     {"raw_stderr", num(d.stderr_raw)}, {"floor", num(d.floor)},
            {"floor_stderr", num(d.stderr_floor)}, {"debiased", num(d.debiased())}, {"points", d.points}};
}

}  // namespace

#define BGK_NULL_CHECK(...)                                                   \
    do {                                                                      \
        if (!bgk_all_nonnull(__VA_ARGS__)) {                                  \
            g_last_error = "null argument";                                   \
            return BGK_ERR_NULL_ARGUMENT;                                     \
        }                                                                     \
    } while (0)

namespace {
template <class... P>
bool bgk_all_nonnull(const P*... ptrs) {
    return ((ptrs != nullptr) && ...);
}
}  // namespace

extern "C" {

const char* bgk_last_error(void) { return g_last_error.c_str(); }

const char* bgk_status_string(bgk_status status) {
    switch (status) {
        case BGK_OK: return "ok";
        case BGK_ERR_INVALID_INPUT: return "invalid input";
        case BGK_ERR_DEGENERATE: return "degenerate";
        case BGK_ERR_NO_SCALE: return "no admissible scale";
        case BGK_ERR_OUT_OF_RANGE: return "out of range";
        case BGK_ERR_INSTABILITY: return "instability";
        case BGK_ERR_PRECONDITION: return "precondition violated";
        case BGK_ERR_IO: return "i/o error";
        case BGK_ERR_INTERNAL: return "internal error";
        case BGK_ERR_NULL_ARGUMENT: return "null argument";
    }
    return "unknown status";
}

const char* bgk_version(void) { return "0.1.0"; }

void bgk_string_free(char* s) { std::free(s); }

bgk_status bgk_rng_create(uint64_t seed, bgk_rng** out) {
    BGK_NULL_CHECK(out);
    return guard([&] { *out = new bgk_rng{bgk::Rng(seed)}; });
}

bgk_status bgk_rng_split(const bgk_rng* rng, uint64_t index, bgk_rng** out) {
    BGK_NULL_CHECK(rng, out);
    return guard([&] { *out = new bgk_rng{rng->rng.split(index)}; });
}

void bgk_rng_destroy(bgk_rng* rng) { delete rng; }

bgk_status bgk_rng_uniform(bgk_rng* rng, double* out) {
    BGK_NULL_CHECK(rng, out);
    return guard([&] { *out = rng->rng.uniform(); });
}

bgk_status bgk_rng_normal(bgk_rng* rng, double* out) {
    BGK_NULL_CHECK(rng, out);
    return guard([&] { *out = rng->rng.normal(); });
}

bgk_status bgk_kernel_create(const char* profile, double epsilon, int dim, bgk_kernel** out) {
    BGK_NULL_CHECK(out);
    return guard([&] {
        bgk::KernelSpec spec;
        spec.profile = profile ? profile : "bump";
        spec.epsilon = epsilon;
        spec.dim = dim;
        *out = new bgk_kernel{bgk::SmearingKernel::build(spec)};
    });
}

void bgk_kernel_destroy(bgk_kernel* k) { delete k; }

bgk_status bgk_kernel_get_info(const bgk_kernel* k, bgk_kernel_info* out) {
    BGK_NULL_CHECK(k, out);
    return guard([&] {
        out->epsilon = k->k.epsilon();
        out->dim = k->k.dim();
        out->phi0 = k->k.phi0();
        out->grad_bound = k->k.grad_bound();
        out->support_radius = k->k.support_radius();
        out->normalization = k->k.normalization();
    });
}

bgk_status bgk_kernel_eval(const bgk_kernel* k, const double* x, double* out) {
    BGK_NULL_CHECK(k, x, out);
    return guard([&] { *out = k->k.eval(bgk::torus_wrap(vec(k->k.dim(), x))); });
}

bgk_status bgk_kernel_sample(const bgk_kernel* k, bgk_rng* rng, double* xi_out) {
    BGK_NULL_CHECK(k, rng, xi_out);
    return guard([&] {
        bgk::TorusVector xi = k->k.sample(rng->rng);
        for (int a = 0; a < k->k.dim(); ++a) xi_out[a] = xi[a];
    });
}

bgk_status bgk_partition_scale(const bgk_kernel* k, double* r_out) {
    BGK_NULL_CHECK(k, r_out);
    return guard([&] { *r_out = bgk::compute_partition_scale(k->k); });
}

bgk_status bgk_torus_distance(int dim, const double* a, const double* b, double* out) {
    BGK_NULL_CHECK(a, b, out);
    return guard([&] { *out = bgk::torus_distance(bgk::torus_wrap(vec(dim, a)), bgk::torus_wrap(vec(dim, b))); });
}

bgk_status bgk_maxwellian_pdf(int dim, const double* u, double T, const double* v, double* out) {
    BGK_NULL_CHECK(u, v, out);
    return guard([&] { *out = bgk::maxwellian_pdf({vec(dim, u), T}, vec(dim, v)); });
}

bgk_status bgk_w2_maxwellians(int dim, const double* u1, double T1, const double* u2, double T2, double* out) {
    BGK_NULL_CHECK(u1, u2, out);
    return guard([&] { *out = bgk::w2_maxwellians({vec(dim, u1), T1}, {vec(dim, u2), T2}); });
}

bgk_status bgk_coupled_maxwellian_sample(bgk_rng* rng, int dim, const double* u1, double T1, const double* u2,
                                         double T2, double* v_out, double* w_out) {
    BGK_NULL_CHECK(rng, u1, u2, v_out, w_out);
    return guard([&] {
        auto [v, w] = bgk::coupled_maxwellian_sample({vec(dim, u1), T1}, {vec(dim, u2), T2}, rng->rng);
        for (int a = 0; a < dim; ++a) {
            v_out[a] = v[a];
            w_out[a] = w[a];
        }
    });
}

bgk_status bgk_particles_create(int dim, size_t n, const double* x, const double* v, bgk_particles** out) {
    BGK_NULL_CHECK(x, v, out);
    return guard([&] {
        bgk::check_dim(dim);
        bgk::ParticleConfig cfg(dim, n);
        std::copy_n(x, n * dim, cfg.x.begin());
        std::copy_n(v, n * dim, cfg.v.begin());
        for (double& c : cfg.x) c = bgk::wrap_coordinate(c);
        bgk::validate(cfg);
        *out = new bgk_particles{std::move(cfg)};
    });
}

bgk_status bgk_particles_sample_initial(int dim, size_t n, double a, double T0, const double* u0, bgk_rng* rng,
                                        bgk_particles** out) {
    BGK_NULL_CHECK(rng, out);
    return guard([&] {
        bgk::InitialLaw law;
        law.dim = dim;
        law.a = a;
        law.T0 = T0;
        law.u0 = vec(dim, u0);
        *out = new bgk_particles{bgk::sample_initial(law, n, rng->rng)};
    });
}

void bgk_particles_destroy(bgk_particles* p) { delete p; }

bgk_status bgk_particles_size(const bgk_particles* p, size_t* n_out, int* dim_out) {
    BGK_NULL_CHECK(p);
    return guard([&] {
        if (n_out) *n_out = p->cfg.size();
        if (dim_out) *dim_out = p->cfg.dim;
    });
}

bgk_status bgk_particles_copy(const bgk_particles* p, double* x_out, double* v_out) {
    BGK_NULL_CHECK(p);
    return guard([&] {
        if (x_out) std::copy(p->cfg.x.begin(), p->cfg.x.end(), x_out);
        if (v_out) std::copy(p->cfg.v.begin(), p->cfg.v.end(), v_out);
    });
}

bgk_status bgk_smeared_fields(const bgk_particles* p, const bgk_kernel* k, const double* x, double* rho,
                              double* u_out, double* T, int* defined) {
    BGK_NULL_CHECK(p, k, x, rho, u_out, T, defined);
    return guard([&] {
        bgk::require(p->cfg.dim == k->k.dim(), "kernel and configuration dimensions differ");
        auto f = bgk::smeared_fields(p->cfg, k->k, bgk::torus_wrap(vec(p->cfg.dim, x)));
        *defined = f ? 1 : 0;
        *rho = f ? f->rho : 0.0;
        *T = f ? f->T : 0.0;
        for (int a = 0; a < p->cfg.dim; ++a) u_out[a] = f ? f->u[a] : 0.0;
    });
}

bgk_status bgk_simulate(bgk_particles* p, const bgk_kernel* k, double t_end, bgk_rng* rng, uint64_t* jumps) {
    BGK_NULL_CHECK(p, k, rng);
    return guard([&] {
        bgk::SimulationStats st = bgk::simulate(p->cfg, k->k, t_end, rng->rng);
        if (jumps) *jumps = st.jumps;
    });
}

bgk_status bgk_empirical_w2(const bgk_particles* a, const bgk_particles* b, double* out) {
    BGK_NULL_CHECK(a, b, out);
    return guard([&] { *out = bgk::empirical_w2(a->cfg, b->cfg); });
}

bgk_status bgk_state_initial(int dim, int nx, int nv, double vmax, double a, double T0, const double* u0,
                             bgk_state** out) {
    BGK_NULL_CHECK(out);
    return guard([&] {
        bgk::InitialLaw law;
        law.dim = dim;
        law.a = a;
        law.T0 = T0;
        law.u0 = vec(dim, u0);
        bgk::validate(law);
        bgk::PhaseGrid g{dim, nx, nv, vmax > 0.0 ? vmax : bgk::auto_vmax(law)};
        *out = new bgk_state{bgk::initial_state(g, law)};
    });
}

void bgk_state_destroy(bgk_state* s) { delete s; }

bgk_status bgk_state_solve(bgk_state* s, const bgk_kernel* k, double t_end, double dt) {
    BGK_NULL_CHECK(s);
    return guard([&] {
        bgk::SolveResult r = bgk::solve(s->s, k ? &k->k : nullptr, t_end, dt);
        s->s = std::move(r.state);
    });
}

bgk_status bgk_state_time(const bgk_state* s, double* t_out) {
    BGK_NULL_CHECK(s, t_out);
    return guard([&] { *t_out = s->s.t; });
}

bgk_status bgk_state_values(const bgk_state* s, const double** values, size_t* count) {
    BGK_NULL_CHECK(s, values, count);
    return guard([&] {
        *values = s->s.values.data();
        *count = s->s.values.size();
    });
}

bgk_status bgk_state_global_moments(const bgk_state* s, bgk_global_moments* out) {
    BGK_NULL_CHECK(s, out);
    return guard([&] {
        bgk::GlobalMoments m = bgk::global_moments(s->s);
        out->mass = m.mass;
        out->energy = m.energy;
        for (int a = 0; a < 3; ++a) out->momentum[a] = a < m.momentum.dim ? m.momentum[a] : 0.0;
    });
}

bgk_status bgk_state_save(const bgk_state* s, const char* path) {
    BGK_NULL_CHECK(s, path);
    return guard([&] {
        std::ofstream out(path, std::ios::binary);
        if (!out) bgk::fail(bgk::ErrorCode::Io, std::string("cannot open ") + path);
        bgk::write_checkpoint(out, s->s);
    });
}

bgk_status bgk_state_load(const char* path, bgk_state** out) {
    BGK_NULL_CHECK(path, out);
    return guard([&] {
        std::ifstream in(path, std::ios::binary);
        if (!in) bgk::fail(bgk::ErrorCode::Io, std::string("cannot open ") + path);
        *out = new bgk_state{bgk::read_checkpoint(in)};
    });
}

bgk_status bgk_constants_report(const bgk_kernel* k, double horizon, double C2, double M, bgk_constants* out) {
    BGK_NULL_CHECK(k, out);
    return guard([&] {
        const double r = bgk::compute_partition_scale(k->k);
        bgk::ConstantsReport c = bgk::constants_report(k->k, r, horizon, C2, M);
        *out = bgk_constants{c.phi0, c.grad_bound, c.r, c.A, c.A_phi, c.M, c.Gamma_phi, c.N_phi};
    });
}

bgk_status bgk_run_chaos_sweep(const char* config_json, char** result_json) {
    BGK_NULL_CHECK(config_json, result_json);
    return guard([&] {
        const bgk::RunConfig cfg = bgk::parse_run_config(config_json);
        const bgk::ChaosSweepResult res = bgk::run_chaos_sweep(cfg);
        json cells = json::array();
        for (const auto& c : res.cells) {
            json rows = json::array();
            for (const auto& r : c.stats.rows)
                rows.push_back({{"t", r.t},
                                {"IN_mean", num(r.IN_mean)},
                                {"IN_stderr", num(r.IN_stderr)},
                                {"frac_BA", num(r.frac_BA)},
                                {"frac_G1", num(r.frac_G1)},
                                {"frac_GM4", num(r.frac_GM4)},
                                {"replicas", r.replicas}});
            cells.push_back({{"N", c.N},
                             {"epsilon", c.epsilon},
                             {"in_regime", c.in_regime},
                             {"N_phi", num(c.constants.N_phi)},
                             {"jumps", c.jumps},
                             {"rows", rows},
                             {"direct_w2", direct_json(c.direct)}});
        }
        json fits = json::array();
        for (std::size_t e = 0; e < res.fits.size(); ++e) {
            json f = fit_json(res.fits[e]);
            f["epsilon"] = cfg.epsilon[e];
            fits.push_back(f);
        }
        *result_json = dup(json{{"sweep", "chaos"}, {"cells", cells}, {"fits", fits}}.dump(2));
    });
}

bgk_status bgk_run_cutoff_sweep(const char* config_json, char** result_json) {
    BGK_NULL_CHECK(config_json, result_json);
    return guard([&] {
        const bgk::CutoffSweepResult res = bgk::run_cutoff_sweep(bgk::parse_run_config(config_json));
        json cells = json::array();
        for (const auto& c : res.cells) cells.push_back({{"epsilon", c.epsilon}, {"w2", direct_json(c.w2)}});
        *result_json = dup(json{{"sweep", "cutoff"}, {"cells", cells}, {"fit", fit_json(res.fit)}}.dump(2));
    });
}

bgk_status bgk_run_solve(const char* config_json, char** result_json) {
    BGK_NULL_CHECK(config_json, result_json);
    return guard([&] {
        const bgk::SolveResult res = bgk::run_solve(bgk::parse_run_config(config_json));
        const bgk::GlobalMoments m0 = res.bounds.samples.front().global;
        const bgk::GlobalMoments m1 = res.bounds.samples.back().global;
        json out{{"t", res.state.t},
                 {"steps", res.bounds.samples.size() - 1},
                 {"mass_drift", m1.mass - m0.mass},
                 {"energy_drift", m1.energy - m0.energy},
                 {"min_temperature", num(res.bounds.min_temperature())},
                 {"density_bound_holds", res.bounds.density_bound_holds(1e-6)},
                 {"clipped", res.diagnostics.clipped},
                 {"unmatched", res.diagnostics.unmatched}};
        *result_json = dup(out.dump(2));
    });
}

bgk_status bgk_run_simulate(const char* config_json, char** result_json) {
    BGK_NULL_CHECK(config_json, result_json);
    return guard([&] {
        const bgk::SimulateResult res = bgk::run_simulate(bgk::parse_run_config(config_json));
        json snaps = json::array();
        for (const auto& s : res.snapshots) {
            std::vector<double> mv(s.mean_velocity.span().begin(), s.mean_velocity.span().end());
            snaps.push_back({{"t", s.t}, {"hash", s.hash}, {"mean_velocity", mv}, {"second_moment", s.second_moment}});
        }
        json out{{"N", res.final_config.size()},
                 {"jumps", res.stats.jumps},
                 {"dirac_jumps", res.stats.dirac_jumps},
                 {"snapshots", snaps}};
        *result_json = dup(out.dump(2));
    });
}

bgk_status bgk_config_normalize(const char* config_json, char** normalized_json) {
    BGK_NULL_CHECK(config_json, normalized_json);
    return guard([&] { *normalized_json = dup(bgk::to_json(bgk::parse_run_config(config_json))); });
}

}  // extern "C"
