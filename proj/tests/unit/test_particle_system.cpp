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
#include <numbers>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "oracles.hpp"
#include "particle_system.hpp"

using namespace bgk;

namespace {

InitialLaw law2(double a = 0.5, double T0 = 1.0) {
    InitialLaw law;
    law.dim = 2;
    law.a = a;
    law.T0 = T0;
    law.u0 = Vec(2);
    return law;
}

}  // namespace

TEST_CASE("initial law constants") {
    InitialLaw law = law2(0.3, 2.0);
    CHECK(law.C2() == doctest::Approx(0.7));
    CHECK(law.alpha() == doctest::Approx(0.25));
    law.u0 = Vec{1.0, 0.0};
    CHECK(law.alpha() == doctest::Approx(0.125));
    // f0 <= C1 exp(-alpha |v|^2) on a sample of points
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        Vec x{rng.uniform() - 0.5, rng.uniform() - 0.5};
        Vec v{4 * rng.normal(), 4 * rng.normal()};
        CHECK(law.density(x, v) <= law.C1() * std::exp(-law.alpha() * norm2(v)) * (1 + 1e-12));
    }
    law.a = 0.7;
    CHECK_THROWS_AS(validate(law), Error);
}

TEST_CASE("inverse spatial CDF inverts the closed-form CDF") {
    InitialLaw law = law2(0.5);
    const double two_pi = 2 * std::numbers::pi;
    for (int i = 0; i <= 1000; ++i) {
        double p = i / 1000.0;
        double s = law.inverse_cdf(p);
        CHECK(s >= -0.5);
        CHECK(s < 0.5);
        if (i > 0 && i < 1000) CHECK(s + 0.5 + 0.5 * std::sin(two_pi * s) / two_pi == doctest::Approx(p).epsilon(1e-13));
    }
}

TEST_CASE("initial samples follow f0") {
    InitialLaw law = law2(0.5, 1.5);
    Rng rng(10);
    ParticleConfig c = sample_initial(law, 50000, rng);
    std::vector<double> x1, x2, v1;
    for (std::size_t i = 0; i < c.size(); ++i) {
        x1.push_back(c.x[2 * i]);
        x2.push_back(c.x[2 * i + 1]);
        v1.push_back(c.v[2 * i]);
    }
    const double two_pi = 2 * std::numbers::pi;
    const double crit = 1.95 / std::sqrt(50000.0);
    CHECK(oracle::ks_statistic(x1, [&](double s) { return s + 0.5 + 0.5 * std::sin(two_pi * s) / two_pi; }) < crit);
    CHECK(oracle::ks_statistic(x2, [](double s) { return s + 0.5; }) < crit);
    CHECK(oracle::ks_statistic(v1, [](double v) { return 0.5 * std::erfc(-v / std::sqrt(2 * 1.5)); }) < crit);
}

TEST_CASE("free streaming wraps positions") {
    ParticleConfig c(2, 1);
    c.set(0, Vec{0.45, -0.45}, Vec{1.0, -0.25});
    free_stream(c, 0.1);
    CHECK(c.x[0] == doctest::Approx(-0.45));
    CHECK(c.x[1] == doctest::Approx(-0.475));
    CHECK_THROWS_AS(free_stream(c, -1.0), Error);
}

TEST_CASE("simulate is reproducible and t_end = 0 is the identity") {
    auto k = SmearingKernel::build({"bump", 0.3, 2});
    Rng r0(1);
    ParticleConfig c0 = sample_initial(law2(), 100, r0);
    ParticleConfig a = c0, b = c0, z = c0;
    Rng ra(5), rb(5), rz(5);
    simulate(z, k, 0.0, rz);
    CHECK(z == c0);
    auto sa = simulate(a, k, 0.5, ra);
    auto sb = simulate(b, k, 0.5, rb);
    CHECK(a == b);
    CHECK(sa.jumps == sb.jumps);
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c0));
}

TEST_CASE("jump counts are Poisson with mean N t") {
    auto k = SmearingKernel::build({"bump", 0.5, 2});
    std::vector<double> counts;
    for (int rep = 0; rep < 200; ++rep) {
        Rng rng = Rng(77).split(rep);
        ParticleConfig c = sample_initial(law2(), 50, rng);
        counts.push_back(static_cast<double>(simulate(c, k, 1.0, rng).jumps));
    }
    auto m = oracle::mean_err(counts);
    CHECK(std::abs(m.mean - 50.0) < 4 * m.stderr_);
}

TEST_CASE("a lone particle keeps its velocity and jumps within the support") {
    auto k = SmearingKernel::build({"bump", 0.2, 2});
    ParticleConfig c(2, 1);
    c.set(0, Vec{0.1, 0.1}, Vec{0.0, 0.0});
    Rng rng(8);
    auto st = simulate(c, k, 20.0, rng);
    CHECK(st.jumps > 0);
    CHECK(st.dirac_jumps == st.jumps);
    CHECK(c.v[0] == 0.0);
    CHECK(c.v[1] == 0.0);
}

TEST_CASE("snapshots do not perturb the trajectory") {
    auto k = SmearingKernel::build({"bump", 0.4, 2});
    Rng r0(2);
    ParticleConfig c0 = sample_initial(law2(), 64, r0);
    ParticleConfig a = c0, b = c0;
    Rng ra(9), rb(9);
    TrajectoryRecorder rec({0.0, 0.1, 0.2, 0.3}, true);
    simulate(a, k, 0.3, ra, &rec);
    simulate(b, k, 0.3, rb);
    REQUIRE(rec.snapshots().size() == 4);
    CHECK(rec.snapshots().front().hash == config_hash(c0));
    CHECK(*rec.snapshots().back().config == a);
    for (std::size_t p = 0; p < a.x.size(); ++p) {
        double dx = a.x[p] - b.x[p];
        CHECK(std::abs(dx - std::round(dx)) < 1e-9);
        CHECK(a.v[p] == doctest::Approx(b.v[p]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(TrajectoryRecorder({0.2, 0.1}), Error);
}

TEST_CASE("configuration CSV round trip") {
    Rng rng(1);
    ParticleConfig c = sample_initial(law2(), 17, rng);
    std::stringstream ss;
    write_config_csv(ss, c);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "x1,x2,v1,v2");
    ss.seekg(0);
    ParticleConfig back = read_config_csv(ss);
    CHECK(back == c);
}
