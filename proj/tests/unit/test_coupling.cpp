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

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "coupling.hpp"
#include "error.hpp"
#include "maxwell.hpp"
#include "oracles.hpp"

using namespace bgk;

namespace {

InitialLaw modulated() {
    InitialLaw law;
    law.dim = 2;
    law.a = 0.5;
    law.T0 = 1.0;
    law.u0 = Vec(2);
    return law;
}

struct Fixture {
    SmearingKernel k = SmearingKernel::build({"bump", 0.25, 2});
    SolveResult g;

    explicit Fixture(double t_end = 0.5, int nx = 32) {
        PhaseGrid grid{2, nx, 24, 8.0};
        g = solve(initial_state(grid, modulated()), &k, t_end, 0.025);
    }
};

const Fixture& shared_fixture() {
    static const Fixture f;
    return f;
}

double central_fraction(const ParticleConfig& c) {
    std::size_t in = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c.x[j * c.dim] >= -0.25 && c.x[j * c.dim] < 0.25) ++in;
    return static_cast<double>(in) / c.size();
}

/// Trapezoid integral of rho over x1 in [-1/4, 1/4].
double central_mass(const KineticState& s) {
    FieldGrid f = moments(s);
    const int nx = s.grid.nx;
    double m = 0.0;
    for (int i = 0; i < nx; ++i) {
        double x = s.grid.x_node(i);
        double w = (std::abs(std::abs(x) - 0.25) < 1e-12) ? 0.5 : (std::abs(x) < 0.25 ? 1.0 : 0.0);
        if (w == 0.0) continue;
        for (int k = 0; k < nx; ++k) m += w * f.rho[static_cast<std::size_t>(i) * nx + k];
    }
    return m / (static_cast<double>(nx) * nx);
}

}  // namespace

TEST_CASE("diagonal coupling starts with zero discrepancy") {
    Rng rng(3);
    auto z0 = sample_initial(modulated(), 50, rng);
    auto cc = diagonal_coupling(z0);
    CHECK(mean_discrepancy(cc) == 0.0);
    const auto& fx = shared_fixture();
    CoupledOptions opt;
    opt.times = {0.0, 0.25};
    std::vector<CoupledRun> runs;
    for (int r = 0; r < 3; ++r) {
        Rng rr = Rng(5).split(r);
        runs.push_back(simulate_coupled(cc, fx.k, fx.g.series, 0.25, opt, rr));
    }
    auto stats = estimate_IN(runs);
    REQUIRE(stats.rows.size() == 2);
    CHECK(stats.rows[0].t == 0.0);
    CHECK(stats.rows[0].IN_mean == 0.0);
    CHECK(stats.rows[0].IN_stderr == 0.0);
    CHECK(stats.rows[1].IN_mean > 0.0);
    CHECK(std::isnan(stats.rows[1].frac_BA));
}

TEST_CASE("pair discrepancy uses the minimal image") {
    ParticleConfig z(2, 1), s(2, 1);
    z.set(0, Vec{0.45, -0.1}, Vec{1.0, 0.0});
    s.set(0, Vec{-0.45, -0.1}, Vec{0.0, 2.0});
    CoupledConfig cc{z, s, 0.0};
    CHECK(pair_discrepancy(cc, 0) == doctest::Approx(0.01 + 1.0 + 4.0));
    Vec d = position_difference(cc, 0);
    CHECK(d[0] == doctest::Approx(-0.1));
    CHECK(d[1] == 0.0);
}

TEST_CASE("position difference resolves the half-period tie by the velocity gap") {
    ParticleConfig z(2, 1), s(2, 1);
    z.set(0, Vec{0.25, 0.0}, Vec{1.0, 0.0});
    s.set(0, Vec{-0.25, 0.0}, Vec{0.0, 0.0});
    CoupledConfig cc{z, s, 0.0};
    CHECK(position_difference(cc, 0)[0] == doctest::Approx(-0.5));
    cc.sigma.set(0, Vec{-0.25, 0.0}, Vec{2.0, 0.0});
    CHECK(position_difference(cc, 0)[0] == doctest::Approx(0.5));
    CHECK(pair_discrepancy(cc, 0) == doctest::Approx(0.25 + 1.0));
}

TEST_CASE("a coupled jump preserves the position gap and follows the optimal map") {
    const auto& fx = shared_fixture();
    Rng rng(11);
    auto z0 = sample_initial(modulated(), 80, rng);
    CoupledConfig cc = diagonal_coupling(z0);
    for (std::size_t j = 0; j < cc.sigma.size(); ++j) {
        Vec y = Vec::from(cc.sigma.position(j));
        y[0] = wrap_coordinate(y[0] + 0.03);
        y[1] = wrap_coordinate(y[1] - 0.02);
        cc.sigma.set(j, y, cc.sigma.velocity_vec(j) + Vec{0.1, 0.0});
    }
    cc.t = 0.2;
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t i = rng.below(cc.z.size());
        Vec before = position_difference(cc, i);
        TorusVector x_old = cc.z.torus_position(i);
        CoupledJump jump = coupled_jump(cc, fx.k, fx.g.series, i, rng);
        Vec after = position_difference(cc, i);
        CHECK(norm(after - before) < 1e-12);
        CHECK(norm(jump.xi) <= fx.k.support_radius() + 1e-15);
        Vec moved = minimal_lift(cc.z.torus_position(i), x_old, Vec(2));
        CHECK(norm(moved - jump.xi) < 1e-12);
        // w - u_g = sqrt(T_g / T_z) (v - u_z)
        Vec v = cc.z.velocity_vec(i), w = cc.sigma.velocity_vec(i);
        if (jump.empirical.T == 0.0) {
            CHECK(norm(v - jump.empirical.u) == 0.0);
            continue;
        }
        const double ratio = std::sqrt(jump.solver.T / jump.empirical.T);
        Vec predicted = jump.solver.u + ratio * (v - jump.empirical.u);
        CHECK(norm(predicted - w) < 1e-10);
        auto direct = smeared_fields(cc.z, fx.k, cc.z.position(i).data());
        CHECK(direct.has_value());
    }
}

TEST_CASE("a cold empirical beam jumps onto its bulk velocity") {
    const auto& fx = shared_fixture();
    ParticleConfig z(2, 30);
    Rng rng(2);
    for (std::size_t j = 0; j < z.size(); ++j) z.set(j, Vec{0.02 * rng.uniform(), 0.02 * rng.uniform()}, Vec{0.7, -0.3});
    CoupledConfig cc = diagonal_coupling(z);
    auto jump = coupled_jump(cc, fx.k, fx.g.series, 4, rng);
    CHECK(std::abs(jump.empirical.T) < 1e-12);
    Vec v = cc.z.velocity_vec(4);
    CHECK(v[0] == doctest::Approx(0.7));
    CHECK(v[1] == doctest::Approx(-0.3));
    CHECK(jump.solver.T > 0.0);
}

TEST_CASE("mean squared velocity gap after a jump equals the Maxwellian W2") {
    const auto& fx = shared_fixture();
    Rng rng(21);
    CoupledConfig base = diagonal_coupling(sample_initial(modulated(), 60, rng));
    base.sigma = sample_initial(modulated(), 60, rng);
    base.t = 0.3;
    std::vector<double> excess;
    for (int rep = 0; rep < 4000; ++rep) {
        CoupledConfig cc = base;
        auto jump = coupled_jump(cc, fx.k, fx.g.series, rep % 60, rng);
        Vec dv = cc.z.velocity_vec(rep % 60) - cc.sigma.velocity_vec(rep % 60);
        double w2 = w2_maxwellians({jump.empirical.u, jump.empirical.T}, {jump.solver.u, jump.solver.T});
        excess.push_back(norm2(dv) - w2);
    }
    auto me = oracle::mean_err(excess);
    CHECK(std::abs(me.mean) <= 4 * me.stderr_);
}

TEST_CASE("both marginals of the coupled process") {
    const auto& fx = shared_fixture();
    const std::size_t n = 400;
    const int reps = 60;
    const double t_obs = 0.15;
    CoupledOptions opt;
    opt.times = {t_obs};
    opt.keep_configs = true;
    std::vector<double> fz, fs, fsim;
    for (int r = 0; r < reps; ++r) {
        Rng base = Rng(77).split(r);
        Rng init = base.split(0), dyn = base.split(1), solo = base.split(2), init2 = base.split(3);
        auto run = simulate_coupled(diagonal_coupling(sample_initial(modulated(), n, init)), fx.k, fx.g.series, 0.5,
                                    opt, dyn);
        REQUIRE(run.snapshots.size() == 1);
        REQUIRE(run.snapshots[0].config.has_value());
        CHECK(run.snapshots[0].t == t_obs);
        fz.push_back(central_fraction(run.snapshots[0].config->z));
        fs.push_back(central_fraction(run.snapshots[0].config->sigma));
        auto cfg = sample_initial(modulated(), n, init2);
        simulate(cfg, fx.k, t_obs, solo);
        fsim.push_back(central_fraction(cfg));
        CHECK(run.final_state.t == 0.5);
    }
    Fixture early(t_obs);
    const double target = central_mass(early.g.state);
    auto ms = oracle::mean_err(fs), mz = oracle::mean_err(fz), mo = oracle::mean_err(fsim);
    CHECK(std::abs(ms.mean - target) <= 4 * ms.stderr_);
    CHECK(std::abs(mz.mean - mo.mean) <= 4 * std::hypot(mz.stderr_, mo.stderr_));
    // the modulation is visible at this resolution
    CHECK(std::abs(target - 0.5) > 4 * ms.stderr_);
}

TEST_CASE("estimate_IN averages particles then replicas") {
    std::vector<CoupledRun> runs(5);
    Rng rng(8);
    std::vector<std::vector<double>> per(2);
    std::vector<int> ba(2, 0);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (int s = 0; s < 2; ++s) {
            CoupledSnapshot snap;
            snap.t = 0.1 * s;
            snap.discrepancy = rng.uniform();
            per[s].push_back(snap.discrepancy);
            GoodSetReport rep;
            rep.in_BA = rng.uniform() < 0.5;
            rep.in_G1 = true;
            rep.in_GMp = {false};
            if (!rep.in_BA) ++ba[s];
            snap.good = rep;
            runs[r].snapshots.push_back(snap);
        }
    }
    auto stats = estimate_IN(runs);
    for (int s = 0; s < 2; ++s) {
        auto me = oracle::mean_err(per[s]);
        CHECK(std::abs(stats.rows[s].IN_mean - me.mean) < 1e-12);
        CHECK(std::abs(stats.rows[s].IN_stderr - me.stderr_) < 1e-12);
        CHECK(stats.rows[s].frac_BA == doctest::Approx(ba[s] / 5.0));
        CHECK(stats.rows[s].frac_G1 == 0.0);
        CHECK(stats.rows[s].frac_GM4 == 1.0);
        CHECK(stats.rows[s].replicas == 5);
    }
    CHECK_THROWS_AS(estimate_IN(std::vector<CoupledRun>(1)), Error);

    ParticleConfig a(1, 2), b(1, 2);
    a.set(0, Vec{0.1}, Vec{1.0});
    a.set(1, Vec{0.2}, Vec{0.0});
    b.set(0, Vec{0.0}, Vec{0.0});
    b.set(1, Vec{0.2}, Vec{2.0});
    CoupledConfig c1{a, b, 0.5}, c2{a, a, 0.5};
    auto row = estimate_IN(std::vector<CoupledConfig>{c1, c2});
    const double d1 = (0.01 + 1.0 + 4.0) / 2;
    CHECK(row.IN_mean == doctest::Approx(d1 / 2));
    CHECK(row.IN_stderr == doctest::Approx(d1 / 2));
}

TEST_CASE("coupled runs are reproducible and respect the field horizon") {
    const auto& fx = shared_fixture();
    Rng init(4);
    auto cc = diagonal_coupling(sample_initial(modulated(), 100, init));
    CoupledOptions opt;
    opt.times = {0.1, 0.3};
    Rng r1(9), r2(9);
    auto a = simulate_coupled(cc, fx.k, fx.g.series, 0.3, opt, r1);
    auto b = simulate_coupled(cc, fx.k, fx.g.series, 0.3, opt, r2);
    CHECK(a.final_state.z == b.final_state.z);
    CHECK(a.final_state.sigma == b.final_state.sigma);
    CHECK(a.stats.jumps == b.stats.jumps);
    Rng r3(9);
    try {
        simulate_coupled(cc, fx.k, fx.g.series, 2.0, opt, r3);
        FAIL("expected OutOfRange past the solved horizon");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfRange);
    }
    opt.times = {0.3, 0.1};
    Rng r4(9);
    CHECK_THROWS_AS(simulate_coupled(cc, fx.k, fx.g.series, 0.3, opt, r4), Error);
}

TEST_CASE("coupling CSV header") {
    CouplingStats stats;
    stats.rows.push_back(CouplingRow{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4});
    std::ostringstream out;
    write_coupling_csv(out, stats, 64, 0.25, 1);
    CHECK(out.str().rfind("t,IN_mean,IN_stderr,frac_BA,frac_G1,frac_GM4,N,eps,replicas,seed\n", 0) == 0);
    CHECK(out.str().find(",64,0.25,4,1\n") != std::string::npos);
}

TEST_CASE("interpolated solver fields converge under grid refinement") {
    // coarse series queried off-grid against the nodes and frames of a finer reference solve
    auto k = SmearingKernel::build({"bump", 0.25, 2});
    const InitialLaw law = modulated();
    const double t_end = 0.2;
    auto ref = solve(initial_state(PhaseGrid{2, 64, 24, 8.0}, law), &k, t_end, 0.005);
    auto gap = [&](int nx, double dt) {
        auto coarse = solve(initial_state(PhaseGrid{2, nx, 24, 8.0}, law), &k, t_end, dt);
        double g = 0.0;
        for (const auto& frame : ref.series.frames()) {
            for (std::size_t i = 0; i < frame.size(); ++i) {
                const double y[2] = {-0.5 + static_cast<double>(i / 64) / 64, -0.5 + static_cast<double>(i % 64) / 64};
                auto h = coarse.series.at(y, std::min(frame.t, coarse.series.t_end()));
                g = std::max({g, std::abs(h.rho - frame.rho[i]), std::abs(h.u[0] - frame.u[2 * i]),
                              std::abs(h.u[1] - frame.u[2 * i + 1]), std::abs(h.T - frame.T[i])});
            }
        }
        return g;
    };
    const double g16 = gap(16, 0.02), g32 = gap(32, 0.01);
    MESSAGE("max field gap to the nx = 64 reference: nx = 16 " << g16 << ", nx = 32 " << g32);
    CHECK(g32 < 0.5 * g16);
    CHECK(g32 < 5e-3);
}
