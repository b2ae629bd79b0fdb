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
#include <limits>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "oracles.hpp"
#include "torus.hpp"

using namespace bgk;

TEST_CASE("wrap_coordinate maps onto [-1/2, 1/2) with ties sent to -1/2") {
    CHECK(wrap_coordinate(0.5) == -0.5);
    CHECK(wrap_coordinate(-0.5) == -0.5);
    CHECK(wrap_coordinate(1.5) == -0.5);
    CHECK(wrap_coordinate(0.7) == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(wrap_coordinate(-2.25) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(wrap_coordinate(0.0) == 0.0);
    CHECK_THROWS_AS(wrap_coordinate(std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(wrap_coordinate(std::numeric_limits<double>::infinity()), Error);

    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        double s = (rng.uniform() - 0.5) * 20.0;
        double w = wrap_coordinate(s);
        REQUIRE(w >= -0.5);
        REQUIRE(w < 0.5);
        CHECK(std::abs(w - s - std::round(w - s)) < 1e-12);
        double df = wrap_fast(s) - w;
        CHECK(std::abs(df - std::round(df)) < 1e-12);
    }
}

TEST_CASE("torus distance equals the brute-force minimum over integer shifts") {
    Rng rng(17);
    for (int d = 1; d <= 3; ++d) {
        for (int trial = 0; trial < 2000; ++trial) {
            std::vector<double> a(d), b(d);
            for (int k = 0; k < d; ++k) {
                a[k] = rng.uniform() - 0.5;
                b[k] = rng.uniform() - 0.5;
            }
            double got = torus_distance(torus_wrap(std::span<const double>(a)), torus_wrap(std::span<const double>(b)));
            CHECK(got * got == doctest::Approx(oracle::torus_dist2(a.data(), b.data(), d)).epsilon(1e-12));
            CHECK(torus_dist2(a.data(), b.data(), d) == doctest::Approx(got * got).epsilon(1e-12));
            CHECK(got <= std::sqrt(static_cast<double>(d)) / 2.0 + 1e-15);
        }
    }
}

TEST_CASE("torus distance is symmetric and satisfies the triangle inequality") {
    Rng rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        Vec a(2), b(2), c(2);
        for (int k = 0; k < 2; ++k) {
            a[k] = rng.uniform() - 0.5;
            b[k] = rng.uniform() - 0.5;
            c[k] = rng.uniform() - 0.5;
        }
        auto ta = torus_wrap(a), tb = torus_wrap(b), tc = torus_wrap(c);
        CHECK(torus_distance(ta, tb) == doctest::Approx(torus_distance(tb, ta)).epsilon(1e-15));
        CHECK(torus_distance(ta, tc) <= torus_distance(ta, tb) + torus_distance(tb, tc) + 1e-15);
    }
}

TEST_CASE("minimal_lift resolves exact half-period ties by the tie direction") {
    auto a = torus_wrap(Vec{0.25, 0.0});
    auto b = torus_wrap(Vec{-0.25, 0.1});
    Vec up = minimal_lift(a, b, Vec{1.0, 0.0});
    Vec down = minimal_lift(a, b, Vec{-1.0, 0.0});
    CHECK(std::abs(up[0]) == 0.5);
    CHECK(std::abs(down[0]) == 0.5);
    CHECK(up[0] * 1.0 <= 0.0);
    CHECK(down[0] * -1.0 <= 0.0);
    CHECK(up[1] == doctest::Approx(-0.1));
}

TEST_CASE("kernel has unit mass, is radial and vanishes outside its support") {
    for (double eps : {1.0, 0.5, 0.25}) {
        auto k = SmearingKernel::build({"bump", eps, 2});
        const double R = k.support_radius();
        CHECK(R == doctest::Approx(eps / 2));
        // midpoint rule on [-R, R]^2
        const int n = 800;
        const double h = 2.0 * R / n;
        double mass = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = -R + (i + 0.5) * h, y = -R + (j + 0.5) * h;
                mass += k.eval_dist2(x * x + y * y);
            }
        CHECK(mass * h * h == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(k.eval_radius(R) == 0.0);
        CHECK(k.eval_radius(R * 1.0001) == 0.0);
        CHECK(k.eval(torus_wrap(Vec{0.1 * eps, 0.2 * eps})) == k.eval(torus_wrap(Vec{-0.2 * eps, 0.1 * eps})));
    }
    auto k1 = SmearingKernel::build({"bump", 0.5, 1});
    double m1 = oracle::simpson([&](double x) { return k1.eval_radius(std::abs(x)); }, -0.25, 0.25, 20000);
    CHECK(m1 == doctest::Approx(1.0).epsilon(1e-9));
    auto k3 = SmearingKernel::build({"bump", 0.5, 3});
    double m3 = 4.0 * std::numbers::pi *
                oracle::simpson([&](double r) { return r * r * k3.eval_radius(r); }, 0.0, 0.25, 20000);
    CHECK(m3 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("phi0 and the normalization agree with an independent quadrature") {
    for (int d = 1; d <= 3; ++d) {
        const double mass = oracle::bump_mass(d);
        auto k = SmearingKernel::build({"bump", 0.3, d});
        CHECK(k.normalization() == doctest::Approx(mass).epsilon(1e-10));
        CHECK(k.phi0() == doctest::Approx(std::exp(-1.0) / (std::pow(0.3, d) * mass)).epsilon(1e-10));
    }
}

TEST_CASE("grad_bound dominates finite-difference gradients and is tight") {
    auto k = SmearingKernel::build({"bump", 0.4, 2});
    double worst = 0.0;
    const double h = 1e-7;
    for (int i = 1; i < 4000; ++i) {
        double r = k.support_radius() * i / 4000.0;
        double g = std::abs(k.eval_radius(r + h) - k.eval_radius(r - h)) / (2 * h);
        worst = std::max(worst, g);
    }
    CHECK(k.grad_bound() >= worst);
    CHECK(k.grad_bound() <= 1.02 * worst);
    // scaling phi0 ~ eps^-d, grad ~ eps^-(d+1)
    auto k2 = SmearingKernel::build({"bump", 0.2, 2});
    CHECK(k2.phi0() / k.phi0() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(k2.grad_bound() / k.grad_bound() == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("kernel samples follow the radial law of phi") {
    auto k = SmearingKernel::build({"bump", 0.5, 2});
    Rng rng(8);
    const int bins = 10;
    std::vector<double> counts(bins, 0.0), probs(bins);
    const double R = k.support_radius();
    for (int i = 0; i < 50000; ++i) {
        TorusVector xi = k.sample(rng);
        double r = xi.norm();
        REQUIRE(r < R);
        counts[std::min(bins - 1, static_cast<int>(r / R * bins))] += 1.0;
    }
    for (int b = 0; b < bins; ++b)
        probs[b] = 2.0 * std::numbers::pi *
                   oracle::simpson([&](double r) { return r * k.eval_radius(r); }, b * R / bins, (b + 1) * R / bins, 2000);
    CHECK(oracle::chi_square(counts, probs) < oracle::chi_square_q999(bins - 1));

    // angular uniformity in quadrants
    std::vector<double> quad(4, 0.0);
    for (int i = 0; i < 40000; ++i) {
        TorusVector xi = k.sample(rng);
        quad[(xi[0] >= 0 ? 1 : 0) + (xi[1] >= 0 ? 2 : 0)] += 1.0;
    }
    CHECK(oracle::chi_square(quad, {0.25, 0.25, 0.25, 0.25}) < oracle::chi_square_q999(3));
}

TEST_CASE("invalid kernel parameters are rejected") {
    CHECK_THROWS_AS(SmearingKernel::build({"bump", 0.0, 2}), Error);
    CHECK_THROWS_AS(SmearingKernel::build({"bump", 1.5, 2}), Error);
    CHECK_THROWS_AS(SmearingKernel::build({"bump", 0.5, 4}), Error);
    CHECK_THROWS_AS(SmearingKernel::build({"gauss", 0.5, 2}), Error);
}

TEST_CASE("partition scale at eps = 1, d = 2 is 1/23") {
    auto k = SmearingKernel::build({"bump", 1.0, 2});
    double r = compute_partition_scale(k);
    CHECK(r == doctest::Approx(1.0 / 23.0).epsilon(1e-15));
    // closed form of the half-height radius of the bump
    const double rho_half = 0.5 * std::sqrt(std::log(2.0) / (1.0 + std::log(2.0)));
    CHECK(5.0 * r * std::sqrt(2.0) < rho_half);
    CHECK(5.0 * (1.0 / 22.0) * std::sqrt(2.0) > rho_half);
    CHECK(partition_predicate_holds(k, r, 41));
    CHECK_FALSE(partition_predicate_holds(k, 1.0 / 22.0, 41));
}

TEST_CASE("partition scale shrinks with eps below the continuous bound") {
    const double rho_half = 0.5 * std::sqrt(std::log(2.0) / (1.0 + std::log(2.0)));
    double prev = 1.0;
    for (double eps : {1.0, 0.5, 0.25, 0.1}) {
        auto k = SmearingKernel::build({"bump", eps, 2});
        double r = compute_partition_scale(k);
        double n = 1.0 / r;
        CHECK(n == doctest::Approx(std::round(n)).epsilon(1e-12));
        CHECK(n >= 11.0);
        CHECK(r <= eps * rho_half / (5.0 * std::sqrt(2.0)));
        // the next coarser scale 1/(n-1) violates the bound unless capped by n >= 11
        if (n > 11.5) CHECK(1.0 / (n - 1.0) >= eps * rho_half / (5.0 * std::sqrt(2.0)));
        CHECK(r < prev);
        prev = r;
    }
}
