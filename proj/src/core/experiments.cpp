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

#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include <omp.h>

#include <json.hpp>

#include "assignment.hpp"
#include "error.hpp"

namespace bgk {

namespace fs = std::filesystem;
using nlohmann::json;

double gamma_phi(double phi0, double grad_bound, double r, int dim) {
    return (phi0 * phi0 * phi0 + grad_bound * grad_bound) / (std::pow(r, 5 * dim) * phi0 * phi0);
}

double n_phi(double phi0, double grad_bound, double r, int dim) {
    const double inner = std::pow(r, 5 * dim) * phi0 * phi0;
    return std::pow(phi0, 4) / std::pow(r, 6 * dim) + std::pow(grad_bound, 8) / std::pow(inner, 4);
}

ConstantsReport constants_report(const SmearingKernel& k, double r, double horizon, double C2, double M) {
    require(r > 0.0 && r < 1.0, "partition scale must lie in (0, 1)");
    require(horizon >= 0.0, "horizon must be nonnegative");
    require(C2 > 0.0, "C2 must be positive");
    ConstantsReport c;
    c.phi0 = k.phi0();
    c.grad_bound = k.grad_bound();
    c.r = r;
    c.A = good_set_A(C2, horizon);
    c.A_phi = good_set_A_phi(c.A, r, k.dim(), c.phi0, c.grad_bound);
    c.M = M;
    c.Gamma_phi = gamma_phi(c.phi0, c.grad_bound, r, k.dim());
    c.N_phi = n_phi(c.phi0, c.grad_bound, r, k.dim());
    return c;
}

bool in_asymptotic_regime(const ConstantsReport& c, const std::vector<std::size_t>& n_list) {
    if (n_list.empty()) return false;
    return static_cast<double>(*std::min_element(n_list.begin(), n_list.end())) > c.N_phi;
}

GridSampler::GridSampler(const KineticState& s) : grid_(s.grid) {
    require(s.values.size() == s.grid.size(), "state size does not match its grid");
    cdf_.resize(s.values.size());
    double acc = 0.0;
    for (std::size_t p = 0; p < s.values.size(); ++p) {
        acc += std::max(0.0, s.values[p]);
        cdf_[p] = acc;
    }
    if (!(acc > 0.0)) fail(ErrorCode::Degenerate, "grid state carries no mass");
}

ParticleConfig GridSampler::sample(std::size_t n, Rng& rng) const {
    const int d = grid_.dim;
    const std::size_t nvel = grid_.velocity_size();
    const double dx = grid_.dx(), dv = grid_.dv();
    ParticleConfig out(d, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double target = rng.uniform() * cdf_.back();
        std::size_t p = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), target) - cdf_.begin());
        p = std::min(p, cdf_.size() - 1);
        const Vec x = grid_.position(p / nvel);
        const Vec v = grid_.velocity(p % nvel);
        for (int a = 0; a < d; ++a) {
            out.x[i * d + a] = wrap_fast(x[a] + (rng.uniform() - 0.5) * dx);
            out.v[i * d + a] = v[a] + (rng.uniform() - 0.5) * dv;
        }
    }
    return out;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "fit inputs differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    LogLogFit fit;
    fit.points = lx.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (lx.size() < 2 || lx.size() != x.size()) {
        fit.slope = fit.intercept = fit.slope_stderr = fit.ci_low = fit.ci_high = nan;
        return fit;
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (lx.size() > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            double res = ly[i] - fit.intercept - fit.slope * lx[i];
            sse += res * res;
        }
        fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
        // two-sided 97.5% Student t quantiles for 1..10 degrees of freedom, then the normal limit
        static const double tq[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
        const std::size_t dof = lx.size() - 2;
        const double q = dof <= 10 ? tq[dof - 1] : 1.96;
        fit.ci_low = fit.slope - q * fit.slope_stderr;
        fit.ci_high = fit.slope + q * fit.slope_stderr;
    } else {
        fit.slope_stderr = fit.ci_low = fit.ci_high = nan;
    }
    return fit;
}

int requested_threads() {
    const char* env = std::getenv("BGK_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) fail(ErrorCode::InvalidInput, "BGK_THREADS must be a positive integer");
    return static_cast<int>(v);
}

namespace {

int worker_threads() {
    int t = requested_threads();
    return t > 0 ? t : omp_get_max_threads();
}

/// Runs body(i) for i in [0, n) over OpenMP workers and rethrows the first failure.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
    for (std::size_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& v, double& stderr_out) {
    const double n = static_cast<double>(v.size());
    double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    stderr_out = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : std::numeric_limits<double>::quiet_NaN();
    return m;
}

ParticleConfig head(const ParticleConfig& c, std::size_t n) {
    ParticleConfig out(c.dim, n);
    std::copy_n(c.x.begin(), n * c.dim, out.x.begin());
    std::copy_n(c.v.begin(), n * c.dim, out.v.begin());
    return out;
}

std::string number_tag(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

void write_fields_file(const fs::path& path, const FieldSeries& series) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    write_fields_csv(out, series);
}

json fit_json(const LogLogFit& f) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"slope", num(f.slope)},   {"intercept", num(f.intercept)}, {"slope_stderr", num(f.slope_stderr)},
            {"ci_low", num(f.ci_low)}, {"ci_high", num(f.ci_high)},     {"points", f.points}};
}

json constants_json(const ConstantsReport& c) { return json::parse(to_json(c)); }

double moment_cap(const SolveResult& g) {
    double m = 0.0;
    for (const auto& s : g.bounds.samples) m = std::max(m, s.fourth_moment);
    return 2.0 * m;
}

DirectW2 summarize(const std::vector<double>& raw, const std::vector<double>& floor, std::size_t points) {
    DirectW2 d;
    d.raw = mean_of(raw, d.stderr_raw);
    d.floor = mean_of(floor, d.stderr_floor);
    d.points = points;
    return d;
}

}  // namespace

ChaosSweepResult run_chaos_sweep(const RunConfig& cfg) {
    validate(cfg);
    const PhaseGrid grid = cfg.phase_grid();
    const KineticState s0 = initial_state(grid, cfg.initial);
    const std::vector<double> times = cfg.snapshot_times();
    const double C2 = cfg.initial.C2();
    const bool write = !cfg.output_dir.empty();
    const fs::path root(cfg.output_dir);
    if (write) fs::create_directories(root);

    ChaosSweepResult result;
    std::ostringstream summary;
    summary.precision(17);
    summary << "sweep,N,eps,t,IN_mean,IN_stderr,direct_w2,direct_w2_stderr,direct_w2_floor,direct_w2_debiased,"
               "chaos_bound,in_regime\n";
    const Rng base(cfg.seed);
    for (std::size_t e = 0; e < cfg.epsilon.size(); ++e) {
        const double eps = cfg.epsilon[e];
        const SmearingKernel k = SmearingKernel::build({"bump", eps, cfg.dim});
        const double r = compute_partition_scale(k);
        const SolveResult g = solve(s0, &k, cfg.t_end, cfg.grid.dt, C2);
        const double M = moment_cap(g);
        const ConstantsReport constants = constants_report(k, r, cfg.t_end, C2, M);
        const GridSampler sampler(g.state);
        std::optional<GoodSetParams> gp;
        if (cfg.good_set) gp = GoodSetParams{r, cfg.t_end, C2, {MomentCap{4, M}}};

        std::vector<double> ns, ins;
        for (std::size_t m = 0; m < cfg.N.size(); ++m) {
            const std::size_t N = cfg.N[m];
            const Rng cell_rng = base.split(e).split(m);
            const std::size_t reps = static_cast<std::size_t>(cfg.replicas);
            const std::size_t pts = std::min(N, cfg.w2_samples);
            std::vector<CoupledRun> runs(reps);
            std::vector<double> raw(reps), floor(reps);
            parallel_for(reps, [&](std::size_t rep) {
                Rng rr = cell_rng.split(rep);
                ParticleConfig z0 = sample_initial(cfg.initial, N, rr);
                CoupledOptions opt{times, gp, false};
                runs[rep] = simulate_coupled(diagonal_coupling(z0), k, g.series, cfg.t_end, opt, rr);
                Rng wr = rr.split(1);
                const ParticleConfig a = sampler.sample(pts, wr);
                const ParticleConfig b = sampler.sample(pts, wr);
                const ParticleConfig c = sampler.sample(pts, wr);
                raw[rep] = empirical_w2(head(runs[rep].final_state.z, pts), a);
                floor[rep] = empirical_w2(b, c);
            });
            ChaosCell cell;
            cell.N = N;
            cell.epsilon = eps;
            cell.constants = constants;
            cell.in_regime = static_cast<double>(N) > constants.N_phi;
            cell.stats = estimate_IN(runs);
            cell.direct = summarize(raw, floor, pts);
            for (const auto& run : runs) cell.jumps += run.stats.jumps;
            ns.push_back(static_cast<double>(N));
            ins.push_back(cell.stats.rows.empty() ? 0.0 : cell.stats.rows.back().IN_mean);

            if (write) {
                const fs::path dir = root / ("chaos_N" + std::to_string(N) + "_eps" + number_tag(eps));
                fs::create_directories(dir);
                std::ostringstream csv;
                write_coupling_csv(csv, cell.stats, N, eps, cfg.seed);
                write_text(dir / "in_series.csv", csv.str());
                write_fields_file(dir / "fields.csv", g.series);
                json man{{"sweep", "chaos"},
                         {"N", N},
                         {"epsilon", eps},
                         {"config", json::parse(to_json(cfg))},
                         {"constants", constants_json(constants)},
                         {"in_regime", cell.in_regime},
                         {"regime_note", cell.in_regime ? "N exceeds N_phi" : "outside the asymptotic regime (N <= N_phi)"},
                         {"jumps", cell.jumps},
                         {"direct_w2",
                          {{"raw", cell.direct.raw},
                           {"raw_stderr", cell.direct.stderr_raw},
                           {"floor", cell.direct.floor},
                           {"floor_stderr", cell.direct.stderr_floor},
                           {"debiased", cell.direct.debiased()},
                           {"points", cell.direct.points}}},
                         {"solver_clipped", g.diagnostics.clipped},
                         {"solver_unmatched", g.diagnostics.unmatched}};
                write_text(dir / "manifest.json", man.dump(2) + "\n");
            }
            const CouplingRow& last = cell.stats.rows.back();
            summary << "chaos," << N << ',' << eps << ',' << last.t << ',' << last.IN_mean << ',' << last.IN_stderr << ','
                    << cell.direct.raw << ',' << cell.direct.stderr_raw << ',' << cell.direct.floor << ','
                    << cell.direct.debiased() << ',' << last.IN_mean << ',' << (cell.in_regime ? 1 : 0) << '\n';
            result.cells.push_back(std::move(cell));
        }
        result.fits.push_back(fit_loglog(ns, ins));
    }
    if (write) {
        for (std::size_t e = 0; e < result.fits.size(); ++e) {
            const LogLogFit& f = result.fits[e];
            summary << "fit_IN_vs_N,," << cfg.epsilon[e] << ',' << cfg.t_end << ',' << f.slope << ',' << f.slope_stderr
                    << ",,,,,," << '\n';
        }
        write_text(root / "summary.csv", summary.str());
    }
    return result;
}

CutoffSweepResult run_cutoff_sweep(const RunConfig& cfg) {
    validate(cfg);
    const PhaseGrid grid = cfg.phase_grid();
    const KineticState s0 = initial_state(grid, cfg.initial);
    const double C2 = cfg.initial.C2();
    const bool write = !cfg.output_dir.empty();
    const fs::path root(cfg.output_dir);
    if (write) fs::create_directories(root);

    const SolveResult f = solve(s0, nullptr, cfg.t_end, cfg.grid.dt, C2);
    const GridSampler f_sampler(f.state);
    if (write) {
        fs::create_directories(root / "cutoff_true_bgk");
        write_fields_file(root / "cutoff_true_bgk" / "fields.csv", f.series);
    }
    CutoffSweepResult result;
    std::ostringstream summary;
    summary.precision(17);
    summary << "sweep,eps,t,w2,w2_stderr,w2_floor,w2_floor_stderr,w2_debiased,points,replicas\n";
    const Rng base(cfg.seed);
    const std::size_t reps = static_cast<std::size_t>(cfg.replicas);
    const std::size_t pts = cfg.w2_samples;
    std::vector<double> eps_list, w2_list;
    for (std::size_t e = 0; e < cfg.epsilon.size(); ++e) {
        const double eps = cfg.epsilon[e];
        const SmearingKernel k = SmearingKernel::build({"bump", eps, cfg.dim});
        const SolveResult g = solve(s0, &k, cfg.t_end, cfg.grid.dt, C2);
        const GridSampler g_sampler(g.state);
        std::vector<double> raw(reps), floor(reps);
        const Rng cell_rng = base.split(e);
        parallel_for(reps, [&](std::size_t rep) {
            Rng rr = cell_rng.split(rep);
            const ParticleConfig a = f_sampler.sample(pts, rr);
            const ParticleConfig b = g_sampler.sample(pts, rr);
            const ParticleConfig c = f_sampler.sample(pts, rr);
            const ParticleConfig d = f_sampler.sample(pts, rr);
            raw[rep] = empirical_w2(a, b);
            floor[rep] = empirical_w2(c, d);
        });
        CutoffCell cell;
        cell.epsilon = eps;
        cell.w2 = summarize(raw, floor, pts);
        eps_list.push_back(eps);
        w2_list.push_back(cell.w2.raw);
        if (write) {
            const fs::path dir = root / ("cutoff_eps" + number_tag(eps));
            fs::create_directories(dir);
            write_fields_file(dir / "fields.csv", g.series);
            std::ostringstream csv;
            csv.precision(17);
            csv << "replica,w2,w2_floor\n";
            for (std::size_t rep = 0; rep < reps; ++rep) csv << rep << ',' << raw[rep] << ',' << floor[rep] << '\n';
            write_text(dir / "w2.csv", csv.str());
            json man{{"sweep", "cutoff"},
                     {"epsilon", eps},
                     {"config", json::parse(to_json(cfg))},
                     {"w2",
                      {{"raw", cell.w2.raw},
                       {"raw_stderr", cell.w2.stderr_raw},
                       {"floor", cell.w2.floor},
                       {"floor_stderr", cell.w2.stderr_floor},
                       {"debiased", cell.w2.debiased()},
                       {"points", pts}}}};
            write_text(dir / "manifest.json", man.dump(2) + "\n");
        }
        summary << "cutoff," << eps << ',' << cfg.t_end << ',' << cell.w2.raw << ',' << cell.w2.stderr_raw << ','
                << cell.w2.floor << ',' << cell.w2.stderr_floor << ',' << cell.w2.debiased() << ',' << pts << ','
                << reps << '\n';
        result.cells.push_back(cell);
    }
    result.fit = fit_loglog(eps_list, w2_list);
    if (write) {
        summary << "fit_w2_vs_eps," << result.fit.slope << ',' << cfg.t_end << ",,,,,,,\n";
        write_text(root / "summary.csv", summary.str());
        json man{{"fit", fit_json(result.fit)}};
        write_text(root / "fit.json", man.dump(2) + "\n");
    }
    return result;
}

SolveResult run_solve(const RunConfig& cfg) {
    validate(cfg);
    const KineticState s0 = initial_state(cfg.phase_grid(), cfg.initial);
    std::optional<SmearingKernel> k;
    if (cfg.regularized) k = SmearingKernel::build({"bump", cfg.epsilon.front(), cfg.dim});
    SolveResult res = solve(s0, k ? &*k : nullptr, cfg.t_end, cfg.grid.dt, cfg.initial.C2());
    if (!cfg.output_dir.empty()) {
        const fs::path root(cfg.output_dir);
        fs::create_directories(root);
        write_fields_file(root / "fields.csv", res.series);
        std::ostringstream b;
        b.precision(17);
        b << "t,min_rho,min_rho_smeared,min_T,max_T,max_speed,mass,energy,fourth_moment";
        for (int q : res.bounds.q_orders) b << ",N_" << q;
        b << ",rho_lower_bound\n";
        for (const auto& s : res.bounds.samples) {
            b << s.t << ',' << s.min_rho << ',' << s.min_rho_smeared << ',' << s.min_T << ',' << s.max_T << ','
              << s.max_speed << ',' << s.global.mass << ',' << s.global.energy << ',' << s.fourth_moment;
            for (double v : s.sup_norms) b << ',' << v;
            b << ',' << res.bounds.C2 * std::exp(-s.t) << '\n';
        }
        write_text(root / "bounds.csv", b.str());
        std::ofstream ck(root / "state.bin", std::ios::binary);
        if (!ck) fail(ErrorCode::Io, "cannot write " + (root / "state.bin").string());
        write_checkpoint(ck, res.state);
        json man{{"command", "solve"},
                 {"config", json::parse(to_json(cfg))},
                 {"clipped", res.diagnostics.clipped},
                 {"unmatched", res.diagnostics.unmatched},
                 {"min_temperature", res.bounds.min_temperature()},
                 {"density_bound_holds", res.bounds.density_bound_holds(1e-6)}};
        write_text(root / "manifest.json", man.dump(2) + "\n");
    }
    return res;
}

SimulateResult run_simulate(const RunConfig& cfg) {
    validate(cfg);
    const SmearingKernel k = SmearingKernel::build({"bump", cfg.epsilon.front(), cfg.dim});
    Rng rng(cfg.seed);
    SimulateResult res;
    res.final_config = sample_initial(cfg.initial, cfg.N.front(), rng);
    TrajectoryRecorder rec(cfg.snapshot_times());
    res.stats = simulate(res.final_config, k, cfg.t_end, rng, &rec);
    res.snapshots = rec.snapshots();
    if (!cfg.output_dir.empty()) {
        const fs::path root(cfg.output_dir);
        fs::create_directories(root);
        std::ostringstream s;
        s.precision(17);
        s << "t,hash";
        for (int a = 0; a < cfg.dim; ++a) s << ",mean_v" << a + 1;
        s << ",second_moment\n";
        for (const auto& snap : res.snapshots) {
            s << snap.t << ',' << snap.hash;
            for (int a = 0; a < cfg.dim; ++a) s << ',' << snap.mean_velocity[a];
            s << ',' << snap.second_moment << '\n';
        }
        write_text(root / "snapshots.csv", s.str());
        std::ofstream fin(root / "final.csv");
        if (!fin) fail(ErrorCode::Io, "cannot write " + (root / "final.csv").string());
        write_config_csv(fin, res.final_config);
        json man{{"command", "simulate"},
                 {"config", json::parse(to_json(cfg))},
                 {"jumps", res.stats.jumps},
                 {"dirac_jumps", res.stats.dirac_jumps}};
        write_text(root / "manifest.json", man.dump(2) + "\n");
    }
    return res;
}

GoodSetFrequency density_event_frequency(const KineticState& g, const SmearingKernel& k, double r, double threshold,
                                         std::size_t n, std::size_t replicas, Rng rng) {
    require(r > 0.0 && r < 0.1, "partition scale must lie in (0, 1/10)");
    require(replicas >= 1 && n >= 1, "need at least one replica and one particle");
    const GridSampler sampler(g);
    const int nodes = 4 * static_cast<int>(std::lround(1.0 / r));
    std::vector<char> failed(replicas, 0);
    parallel_for(replicas, [&](std::size_t rep) {
        Rng rr = rng.split(rep);
        const ParticleConfig c = sampler.sample(n, rr);
        failed[rep] = density_exceeds_on_grid(c, k, threshold, nodes, true).above ? 0 : 1;
    });
    GoodSetFrequency out;
    out.N = n;
    out.replicas = replicas;
    out.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    return out;
}

}  // namespace bgk
