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

#include "particle_system.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace bgk {

double InitialLaw::alpha() const { return norm2(u0) == 0.0 ? 1.0 / (2.0 * T0) : 1.0 / (4.0 * T0); }

double InitialLaw::C1() const {
    // |v - u0|^2 >= |v|^2 / 2 - |u0|^2 handles a shifted mean
    double c = (1.0 + a) * std::pow(2.0 * std::numbers::pi * T0, -0.5 * dim);
    if (norm2(u0) != 0.0) c *= std::exp(norm2(u0) / (2.0 * T0));
    return c;
}

double InitialLaw::spatial_density(double s) const { return 1.0 + a * std::cos(2.0 * std::numbers::pi * s); }

double InitialLaw::density(const Vec& x, const Vec& v) const {
    return spatial_density(x[0]) * maxwellian_pdf({u0, T0}, v);
}

double InitialLaw::inverse_cdf(double p) const {
    const double two_pi = 2.0 * std::numbers::pi;
    auto cdf = [&](double s) { return s + 0.5 + a * std::sin(two_pi * s) / two_pi; };
    double lo = -0.5, hi = 0.5;
    double s = p - 0.5;
    for (int it = 0; it < 60; ++it) {
        double f = cdf(s) - p;
        if (f > 0) hi = s;
        else lo = s;
        double step = f / spatial_density(s);
        double next = s - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) < 1e-16) {
            s = next;
            break;
        }
        s = next;
    }
    return s >= 0.5 ? -0.5 : s;
}

void validate(const InitialLaw& law) {
    check_dim(law.dim);
    require(law.u0.dim == law.dim, "initial mean velocity has the wrong dimension");
    require(law.a >= 0.0 && law.a <= 0.5, "density amplitude a must lie in [0, 1/2]");
    require(law.T0 > 0.0 && std::isfinite(law.T0), "initial temperature must be positive");
}

ParticleConfig sample_initial(const InitialLaw& law, std::size_t n, Rng& rng) {
    validate(law);
    require(n >= 1, "need at least one particle");
    const int d = law.dim;
    ParticleConfig cfg(d, n);
    const MaxwellianParams m{law.u0, law.T0};
    for (std::size_t i = 0; i < n; ++i) {
        cfg.x[i * d] = law.a == 0.0 ? rng.uniform() - 0.5 : law.inverse_cdf(rng.uniform());
        for (int k = 1; k < d; ++k) cfg.x[i * d + k] = rng.uniform() - 0.5;
        Vec v = maxwellian_sample(m, rng);
        for (int k = 0; k < d; ++k) cfg.v[i * d + k] = v[k];
    }
    return cfg;
}

void free_stream(ParticleConfig& cfg, double dt) {
    require(dt >= 0.0, "stream time must be nonnegative");
    if (dt == 0.0) return;
    for (std::size_t p = 0; p < cfg.x.size(); ++p) cfg.x[p] = wrap_fast(cfg.x[p] + cfg.v[p] * dt);
}

TrajectoryRecorder::TrajectoryRecorder(std::vector<double> times, bool keep_configs)
    : times_(std::move(times)), keep_configs_(keep_configs) {
    for (std::size_t i = 0; i < times_.size(); ++i) {
        require(std::isfinite(times_[i]) && times_[i] >= 0.0, "snapshot times must be finite and nonnegative");
        if (i > 0) require(times_[i] > times_[i - 1], "snapshot times must be strictly increasing");
    }
}

void TrajectoryRecorder::record(double t, const ParticleConfig& cfg) {
    Snapshot s;
    s.t = t;
    s.hash = config_hash(cfg);
    const int d = cfg.dim;
    const std::size_t n = cfg.size();
    s.mean_velocity = Vec(d);
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < d; ++a) {
            double vi = cfg.v[i * d + a];
            s.mean_velocity[a] += vi;
            m2 += vi * vi;
        }
    }
    s.mean_velocity *= 1.0 / static_cast<double>(n);
    s.second_moment = m2 / static_cast<double>(n);
    if (keep_configs_) s.config = cfg;
    snapshots_.push_back(std::move(s));
}

SimulationStats simulate(ParticleConfig& cfg, const SmearingKernel& k, double t_end, Rng& rng,
                         TrajectoryRecorder* recorder) {
    validate(cfg);
    require(cfg.dim == k.dim(), "kernel and configuration dimensions differ");
    require(t_end >= 0.0 && std::isfinite(t_end), "t_end must be finite and nonnegative");
    const int d = cfg.dim;
    const std::size_t n = cfg.size();
    const double rate = static_cast<double>(n);

    std::size_t next_snap = 0;
    const std::vector<double> no_times;
    const std::vector<double>& snaps = recorder ? recorder->times() : no_times;

    SimulationStats stats;
    double t = 0.0;
    // pending jump time; snapshots never redraw it (memorylessness keeps the law exact)
    double t_jump = rng.exponential(rate);
    Vec target(d);
    while (true) {
        while (next_snap < snaps.size() && snaps[next_snap] <= t_end && snaps[next_snap] <= t_jump) {
            free_stream(cfg, snaps[next_snap] - t);
            t = snaps[next_snap];
            recorder->record(t, cfg);
            ++next_snap;
        }
        if (t_jump > t_end) {
            free_stream(cfg, t_end - t);
            break;
        }
        free_stream(cfg, t_jump - t);
        t = t_jump;

        const std::size_t i = rng.below(n);
        const TorusVector xi = k.sample(rng);
        for (int a = 0; a < d; ++a) target[a] = wrap_fast(cfg.x[i * d + a] + xi[a]);
        auto fields = smeared_fields(cfg, k, target.c.data());
        if (!fields) fail(ErrorCode::Internal, "smeared density vanished at a jump target");
        Vec v_new = maxwellian_sample({fields->u, fields->T}, rng);
        if (fields->contributors == 1) ++stats.dirac_jumps;
        cfg.set(i, target, v_new);
        ++stats.jumps;
        t_jump = t + rng.exponential(rate);
    }
    return stats;
}

}  // namespace bgk
