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

#include "coupling.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "error.hpp"
#include "maxwell.hpp"

namespace bgk {

namespace {

double mean_sq_stderr(const std::vector<double>& values, double& mean) {
    const double n = static_cast<double>(values.size());
    double s = 0.0;
    for (double v : values) s += v;
    mean = s / n;
    if (values.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0) / n);
}

void velocity_moments(const ParticleConfig& c, Vec& mean, double& second) {
    const int d = c.dim;
    const std::size_t n = c.size();
    mean = Vec(d);
    second = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (int a = 0; a < d; ++a) {
            double v = c.v[j * d + a];
            mean[a] += v;
            second += v * v;
        }
    }
    mean *= 1.0 / static_cast<double>(n);
    second /= static_cast<double>(n);
}

}  // namespace

CoupledConfig diagonal_coupling(const ParticleConfig& z0) {
    validate(z0);
    return CoupledConfig{z0, z0, 0.0};
}

void validate(const CoupledConfig& cc) {
    validate(cc.z);
    validate(cc.sigma);
    require(cc.z.dim == cc.sigma.dim && cc.z.size() == cc.sigma.size(), "Z_N and Sigma_N must have equal size and dimension");
    require(std::isfinite(cc.t) && cc.t >= 0.0, "coupled time must be finite and nonnegative");
}

double pair_discrepancy(const CoupledConfig& cc, std::size_t j) {
    const int d = cc.z.dim;
    double s = torus_dist2(cc.z.x.data() + j * d, cc.sigma.x.data() + j * d, d);
    for (int a = 0; a < d; ++a) {
        double dv = cc.z.v[j * d + a] - cc.sigma.v[j * d + a];
        s += dv * dv;
    }
    return s;
}

double mean_discrepancy(const CoupledConfig& cc) {
    double s = 0.0;
    for (std::size_t j = 0; j < cc.z.size(); ++j) s += pair_discrepancy(cc, j);
    return s / static_cast<double>(cc.z.size());
}

Vec position_difference(const CoupledConfig& cc, std::size_t j) {
    Vec dv = cc.z.velocity_vec(j) - cc.sigma.velocity_vec(j);
    return minimal_lift(cc.z.torus_position(j), cc.sigma.torus_position(j), dv);
}

CoupledJump coupled_jump(CoupledConfig& cc, const SmearingKernel& k, const FieldSeries& gfields, std::size_t i,
                         Rng& rng) {
    require(i < cc.z.size(), "particle index out of range");
    const int d = cc.z.dim;
    CoupledJump out;
    const TorusVector xi = k.sample(rng);
    out.xi = xi.vec();
    Vec xt(d), yt(d);
    for (int a = 0; a < d; ++a) {
        xt[a] = wrap_fast(cc.z.x[i * d + a] + xi[a]);
        yt[a] = wrap_fast(cc.sigma.x[i * d + a] + xi[a]);
    }
    out.solver = gfields.at(yt.c.data(), cc.t);
    auto emp = smeared_fields(cc.z, k, xt.c.data());
    if (!emp) fail(ErrorCode::Internal, "smeared density vanished at a jump target");
    out.empirical = *emp;
    auto [v_new, w_new] = coupled_maxwellian_sample({out.empirical.u, out.empirical.T},
                                                    {out.solver.u, std::max(0.0, out.solver.T)}, rng);
    cc.z.set(i, xt, v_new);
    cc.sigma.set(i, yt, w_new);
    return out;
}

namespace {

CoupledSnapshot take_snapshot(const CoupledConfig& cc, const SmearingKernel& k, const CoupledOptions& opt) {
    CoupledSnapshot s;
    s.t = cc.t;
    s.discrepancy = mean_discrepancy(cc);
    velocity_moments(cc.z, s.z_mean_velocity, s.z_second_moment);
    velocity_moments(cc.sigma, s.sigma_mean_velocity, s.sigma_second_moment);
    if (opt.good_set) s.good = good_set_report(cc.z, cc.sigma, k, *opt.good_set);
    if (opt.keep_configs) s.config = cc;
    return s;
}

}  // namespace

CoupledRun simulate_coupled(CoupledConfig cc, const SmearingKernel& k, const FieldSeries& gfields, double t_end,
                            const CoupledOptions& options, Rng& rng) {
    validate(cc);
    require(cc.z.dim == k.dim(), "kernel and configuration dimensions differ");
    require(t_end >= 0.0 && std::isfinite(t_end), "t_end must be finite and nonnegative");
    for (std::size_t s = 1; s < options.times.size(); ++s)
        require(options.times[s] > options.times[s - 1], "snapshot times must be strictly increasing");
    const std::size_t n = cc.z.size();
    const double rate = static_cast<double>(n);

    CoupledRun run;
    std::size_t next = 0;
    while (next < options.times.size() && options.times[next] < cc.t) ++next;
    double t_jump = cc.t + rng.exponential(rate);
    auto advance = [&](double t) {
        free_stream(cc.z, t - cc.t);
        free_stream(cc.sigma, t - cc.t);
        cc.t = t;
    };
    while (true) {
        while (next < options.times.size() && options.times[next] <= t_end && options.times[next] <= t_jump) {
            advance(options.times[next]);
            run.snapshots.push_back(take_snapshot(cc, k, options));
            ++next;
        }
        if (t_jump > t_end) {
            advance(t_end);
            break;
        }
        advance(t_jump);
        const std::size_t i = rng.below(n);
        CoupledJump j = coupled_jump(cc, k, gfields, i, rng);
        if (j.empirical.contributors == 1) ++run.stats.dirac_jumps;
        ++run.stats.jumps;
        t_jump = cc.t + rng.exponential(rate);
    }
    run.final_state = std::move(cc);
    return run;
}

CouplingStats estimate_IN(const std::vector<CoupledRun>& replicas) {
    require(replicas.size() >= 2, "at least two replicas are required");
    const std::size_t rows = replicas.front().snapshots.size();
    for (const auto& r : replicas) require(r.snapshots.size() == rows, "replicas carry different snapshot counts");
    CouplingStats stats;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t s = 0; s < rows; ++s) {
        CouplingRow row;
        row.t = replicas.front().snapshots[s].t;
        row.replicas = replicas.size();
        std::vector<double> values;
        std::size_t good = 0, ba = 0, g1 = 0, gm4 = 0, gm4_count = 0;
        for (const auto& r : replicas) {
            const CoupledSnapshot& snap = r.snapshots[s];
            values.push_back(snap.discrepancy);
            if (!snap.good) continue;
            ++good;
            if (!snap.good->in_BA) ++ba;
            if (!snap.good->in_G1) ++g1;
            if (!snap.good->in_GMp.empty()) {
                ++gm4_count;
                if (!snap.good->in_GMp.front()) ++gm4;
            }
        }
        row.IN_stderr = mean_sq_stderr(values, row.IN_mean);
        row.frac_BA = good ? static_cast<double>(ba) / good : nan;
        row.frac_G1 = good ? static_cast<double>(g1) / good : nan;
        row.frac_GM4 = gm4_count ? static_cast<double>(gm4) / gm4_count : nan;
        stats.rows.push_back(row);
    }
    return stats;
}

CouplingRow estimate_IN(const std::vector<CoupledConfig>& replicas) {
    require(replicas.size() >= 2, "at least two replicas are required");
    CouplingRow row;
    row.t = replicas.front().t;
    row.replicas = replicas.size();
    std::vector<double> values;
    for (const auto& cc : replicas) values.push_back(mean_discrepancy(cc));
    row.IN_stderr = mean_sq_stderr(values, row.IN_mean);
    row.frac_BA = row.frac_G1 = row.frac_GM4 = std::numeric_limits<double>::quiet_NaN();
    return row;
}

void write_coupling_csv(std::ostream& out, const CouplingStats& stats, std::size_t n, double eps, std::uint64_t seed) {
    out << "t,IN_mean,IN_stderr,frac_BA,frac_G1,frac_GM4,N,eps,replicas,seed\n";
    out.precision(17);
    for (const auto& r : stats.rows) {
        out << r.t << ',' << r.IN_mean << ',' << r.IN_stderr << ',' << r.frac_BA << ',' << r.frac_G1 << ','
            << r.frac_GM4 << ',' << n << ',' << eps << ',' << r.replicas << ',' << seed << '\n';
    }
}

}  // namespace bgk
