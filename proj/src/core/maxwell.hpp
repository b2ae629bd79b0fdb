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

#pragma once

#include <utility>

#include "rng.hpp"
#include "torus.hpp"

namespace bgk {

/// Isotropic Gaussian velocity law M_{u,T}; T == 0 is the Dirac mass at u.
struct MaxwellianParams {
    Vec u;
    double T = 0.0;

    int dim() const { return u.dim; }
    bool degenerate() const { return T == 0.0; }
};

void validate(const MaxwellianParams& p);

/// (2 pi T)^{-d/2} exp(-|v - u|^2 / (2T)). Throws Error(Degenerate) when T == 0.
double maxwellian_pdf(const MaxwellianParams& p, const Vec& v);

Vec maxwellian_sample(const MaxwellianParams& p, Rng& rng);

/// Squared 2-Wasserstein distance |u1 - u2|^2 + d (sqrt T1 - sqrt T2)^2.
double w2_maxwellians(const MaxwellianParams& p1, const MaxwellianParams& p2);

/// Draw (v, w) from the optimal coupling of the two laws: v ~ M1 and
/// w = u2 + sqrt(T2 / T1) (v - u1). If T1 == 0 the pair is (u1, w) with
/// w ~ M2 drawn independently, which keeps both marginals exact.
std::pair<Vec, Vec> coupled_maxwellian_sample(const MaxwellianParams& p1, const MaxwellianParams& p2, Rng& rng);

}  // namespace bgk
