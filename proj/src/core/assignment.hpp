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

#include <cstddef>
#include <functional>
#include <vector>

#include "particles_config.hpp"

namespace bgk {

struct Assignment {
    /// column assigned to each row
    std::vector<std::size_t> column;
    double total_cost = 0.0;
};

/// Minimum-cost perfect matching of an n x n dense cost given by cost(i, j);
/// shortest augmenting paths with dual potentials, O(n^3).
Assignment solve_assignment(std::size_t n, const std::function<double(std::size_t, std::size_t)>& cost);

inline constexpr std::size_t kMaxW2Points = 4096;

/// Squared cost between point i of a and point j of b: minimal-image
/// |x_i - y_j|^2 plus |v_i - w_j|^2.
double phase_cost(const ParticleConfig& a, std::size_t i, const ParticleConfig& b, std::size_t j);

/// Squared 2-Wasserstein distance between the uniform empirical measures of
/// two equal-size clouds. Refuses clouds above kMaxW2Points.
double empirical_w2(const ParticleConfig& a, const ParticleConfig& b);

}  // namespace bgk
