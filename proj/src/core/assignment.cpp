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

#include "assignment.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "error.hpp"

namespace bgk {

Assignment solve_assignment(std::size_t n, const std::function<double(std::size_t, std::size_t)>& cost) {
    Assignment out;
    if (n == 0) return out;
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based: row_of[j] is the row matched to column j, column 0 is the virtual root
    std::vector<double> pot_row(n + 1, 0.0), pot_col(n + 1, 0.0), min_slack(n + 1);
    std::vector<std::size_t> row_of(n + 1, 0), prev(n + 1, 0);
    std::vector<char> used(n + 1);
    std::vector<double> row_cost(n);
    for (std::size_t i = 1; i <= n; ++i) {
        row_of[0] = i;
        std::size_t j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) row_cost[j - 1] = used[j] ? 0.0 : cost(i0 - 1, j - 1);
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = row_cost[j - 1] - pot_row[i0] - pot_col[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    prev[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            if (j1 == 0) fail(ErrorCode::InvalidInput, "assignment cost is not finite");
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    pot_row[row_of[j]] += delta;
                    pot_col[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of[j0] != 0);
        do {
            const std::size_t j1 = prev[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    out.column.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) out.column[row_of[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) out.total_cost += cost(i, out.column[i]);
    return out;
}

double phase_cost(const ParticleConfig& a, std::size_t i, const ParticleConfig& b, std::size_t j) {
    const int d = a.dim;
    double c = torus_dist2(a.x.data() + i * d, b.x.data() + j * d, d);
    for (int k = 0; k < d; ++k) {
        const double dv = a.v[i * d + k] - b.v[j * d + k];
        c += dv * dv;
    }
    return c;
}

double empirical_w2(const ParticleConfig& a, const ParticleConfig& b) {
    require(a.dim == b.dim, "clouds differ in dimension");
    require(a.size() == b.size(), "clouds must have equal size (" + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
    require(a.size() > 0, "clouds must be nonempty");
    if (a.size() > kMaxW2Points)
        fail(ErrorCode::InvalidInput, "cloud of " + std::to_string(a.size()) + " points exceeds the limit of " +
                                          std::to_string(kMaxW2Points) + "; subsample both clouds first");
    Assignment as = solve_assignment(a.size(), [&](std::size_t i, std::size_t j) { return phase_cost(a, i, b, j); });
    return as.total_cost / static_cast<double>(a.size());
}

}  // namespace bgk
