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

#include "kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace bgk {

double BumpProfile::value_sq(double s2) const {
    double q = 1.0 - 4.0 * s2;
    if (q <= 0.0) return 0.0;
    return std::exp(-1.0 / q);
}

std::shared_ptr<const RadialProfile> make_profile(const std::string& name) {
    if (name == "bump") return std::make_shared<BumpProfile>();
    fail(ErrorCode::InvalidInput, "unknown kernel profile '" + name + "'");
}

namespace {

// Surface measure of the unit sphere in R^d.
double sphere_area(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * std::numbers::pi;
        default: return 4.0 * std::numbers::pi;
    }
}

}  // namespace

SmearingKernel SmearingKernel::build(const KernelSpec& spec) {
    check_dim(spec.dim);
    if (!(spec.epsilon > 0.0 && spec.epsilon <= 1.0)) {
        std::ostringstream msg;
        msg << "kernel epsilon must lie in (0, 1], got " << spec.epsilon;
        fail(ErrorCode::InvalidInput, msg.str());
    }
    require(spec.quad_tol > 0.0, "quadrature tolerance must be positive");
    require(spec.grad_grid >= 100, "gradient grid too coarse");

    SmearingKernel k;
    k.spec_ = spec;
    k.profile_ = make_profile(spec.profile);

    const RadialProfile& h = *k.profile_;
    const int d = spec.dim;
    double error = 0.0;
    auto integrand = [&](double s) { return std::pow(s, d - 1) * h.value(s); };
    double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 0.5, 30,
                                                                                  spec.quad_tol, &error);
    k.normalization_ = sphere_area(d) * radial;
    require(k.normalization_ > 0.0, "kernel profile has zero mass");

    const double eps = spec.epsilon;
    const double eps_d = std::pow(eps, d);
    k.scale_ = 1.0 / (eps_d * k.normalization_);
    k.inv_eps2_ = 1.0 / (eps * eps);
    k.support_radius_ = 0.5 * eps;
    k.support_radius2_ = k.support_radius_ * k.support_radius_;
    k.phi0_ = k.scale_ * h.value_sq(0.0);

    // sup |grad phibar| by central differences on a radial grid
    const double step = 1e-6;
    double slope = 0.0;
    for (int i = 1; i < spec.grad_grid; ++i) {
        double s = 0.5 * i / spec.grad_grid;
        double dh = (h.value(s + step) - h.value(s - step)) / (2.0 * step);
        slope = std::max(slope, std::abs(dh));
    }
    k.grad_bound_ = 1.01 * slope / (k.normalization_ * eps_d * eps);
    return k;
}

TorusVector SmearingKernel::sample(Rng& rng) const {
    const int d = dim();
    const double r = support_radius_;
    Vec x(d);
    while (true) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            x[k] = r * (2.0 * rng.uniform() - 1.0);
            r2 += x[k] * x[k];
        }
        double value = eval_dist2(r2);
        if (rng.uniform() * phi0_ < value) return torus_wrap(x);
    }
}

bool partition_predicate_holds(const SmearingKernel& k, double r, int points_per_axis) {
    require(points_per_axis >= 2, "need at least two points per axis");
    const int d = k.dim();
    const double half = 0.5 * k.phi0();
    const double side = 5.0 * r;
    std::array<int, kMaxDim> idx{};
    while (true) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double s = -side + 2.0 * side * idx[a] / (points_per_axis - 1);
            r2 += s * s;
        }
        if (!(k.eval_dist2(r2) > half)) return false;
        int a = 0;
        while (a < d && ++idx[a] == points_per_axis) idx[a++] = 0;
        if (a == d) return true;
    }
}

double compute_partition_scale(const SmearingKernel& k, int max_inverse, int points_per_axis) {
    const int d = k.dim();
    // radius where the profile crosses phi0 / 2
    double lo = 0.0, hi = k.support_radius();
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (k.eval_radius(mid) > 0.5 * k.phi0()) lo = mid;
        else hi = mid;
    }
    const double corner = 5.0 * std::sqrt(static_cast<double>(d));
    long n = std::max<long>(11, static_cast<long>(std::floor(corner / lo)) + 1);
    for (; n <= max_inverse; ++n) {
        if (partition_predicate_holds(k, 1.0 / static_cast<double>(n), points_per_axis)) return 1.0 / static_cast<double>(n);
    }
    std::ostringstream msg;
    msg << "no partition scale r = 1/n with n <= " << max_inverse << " satisfies phi > phi0/2 on [-5r, 5r]^" << d
        << " (half-height radius " << lo << ", epsilon " << k.epsilon() << ")";
    fail(ErrorCode::NoScale, msg.str());
}

}  // namespace bgk
