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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "torus.hpp"

namespace bgk {

/// Microstate Z_N = (X_N, V_N): flat row-major storage, `dim` doubles per particle.
struct ParticleConfig {
    int dim = 2;
    std::vector<double> x;
    std::vector<double> v;

    ParticleConfig() = default;
    ParticleConfig(int d, std::size_t n) : dim(d), x(n * d, 0.0), v(n * d, 0.0) {}

    std::size_t size() const { return dim > 0 ? x.size() / static_cast<std::size_t>(dim) : 0; }

    std::span<double> position(std::size_t i) { return {x.data() + i * dim, static_cast<std::size_t>(dim)}; }
    std::span<const double> position(std::size_t i) const { return {x.data() + i * dim, static_cast<std::size_t>(dim)}; }
    std::span<double> velocity(std::size_t i) { return {v.data() + i * dim, static_cast<std::size_t>(dim)}; }
    std::span<const double> velocity(std::size_t i) const { return {v.data() + i * dim, static_cast<std::size_t>(dim)}; }

    TorusVector torus_position(std::size_t i) const { return torus_wrap(position(i)); }
    Vec velocity_vec(std::size_t i) const { return Vec::from(velocity(i)); }

    void set(std::size_t i, const Vec& pos, const Vec& vel);

    bool operator==(const ParticleConfig&) const = default;
};

/// Throws unless N >= 1, positions are wrapped and velocities finite.
void validate(const ParticleConfig& cfg);

/// FNV-1a over the raw bytes; used to fingerprint snapshots.
std::uint64_t config_hash(const ParticleConfig& cfg);

/// CSV snapshot with header "x1..xd,v1..vd", 17 significant digits.
void write_config_csv(std::ostream& out, const ParticleConfig& cfg);
ParticleConfig read_config_csv(std::istream& in);

}  // namespace bgk
