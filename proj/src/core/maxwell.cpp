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

#include "maxwell.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace bgk {

void validate(const MaxwellianParams& p) {
    check_dim(p.dim());
    if (!(p.T >= 0.0) || !std::isfinite(p.T)) fail(ErrorCode::InvalidInput, "Maxwellian temperature must be finite and >= 0");
    for (int k = 0; k < p.dim(); ++k) {
        if (!std::isfinite(p.u[k])) fail(ErrorCode::InvalidInput, "Maxwellian mean velocity must be finite");
    }
}

double maxwellian_pdf(const MaxwellianParams& p, const Vec& v) {
    validate(p);
    require(v.dim == p.dim(), "velocity dimension mismatch");
    if (p.degenerate()) fail(ErrorCode::Degenerate, "Maxwellian with T = 0 has no density (Dirac mass)");
    const double d = p.dim();
    return std::pow(2.0 * std::numbers::pi * p.T, -0.5 * d) * std::exp(-norm2(v - p.u) / (2.0 * p.T));
}

Vec maxwellian_sample(const MaxwellianParams& p, Rng& rng) {
    Vec v = p.u;
    if (p.T > 0.0) {
        const double s = std::sqrt(p.T);
        for (int k = 0; k < v.dim; ++k) v[k] += s * rng.normal();
    }
    return v;
}

double w2_maxwellians(const MaxwellianParams& p1, const MaxwellianParams& p2) {
    validate(p1);
    validate(p2);
    require(p1.dim() == p2.dim(), "Maxwellian dimension mismatch");
    const double dt = std::sqrt(p1.T) - std::sqrt(p2.T);
    return norm2(p1.u - p2.u) + p1.dim() * dt * dt;
}

std::pair<Vec, Vec> coupled_maxwellian_sample(const MaxwellianParams& p1, const MaxwellianParams& p2, Rng& rng) {
    require(p1.dim() == p2.dim(), "Maxwellian dimension mismatch");
    if (p1.degenerate()) return {p1.u, maxwellian_sample(p2, rng)};
    Vec v = maxwellian_sample(p1, rng);
    const double ratio = std::sqrt(p2.T / p1.T);
    Vec w = p2.u + ratio * (v - p1.u);
    return {v, w};
}

}  // namespace bgk
