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
#include <functional>
#include <optional>
#include <vector>

#include "fields.hpp"
#include "kernel.hpp"
#include "maxwell.hpp"
#include "particles_config.hpp"
#include "rng.hpp"

namespace bgk {

/// f0(x, v) = (1 + a cos(2 pi x_1)) M_{u0,T0}(v) on the torus times R^d.
struct InitialLaw {
    int dim = 2;
    double a = 0.0;
    double T0 = 1.0;
    Vec u0 = Vec(2);

    /// Mass of the lower envelope (1 - a) M_{u0,T0}.
    double C2() const { return 1.0 - a; }
    /// Gaussian decay rate alpha with f0 <= C1 exp(-alpha |v|^2).
    double alpha() const;
    double C1() const;

    double density(const Vec& x, const Vec& v) const;
    /// Spatial density 1 + a cos(2 pi s) of the first coordinate.
    double spatial_density(double s) const;
    /// Inverse of s -> s + 1/2 + a sin(2 pi s) / (2 pi) on [-1/2, 1/2).
    double inverse_cdf(double p) const;
};

void validate(const InitialLaw& law);

/// N i.i.d. draws from f0.
ParticleConfig sample_initial(const InitialLaw& law, std::size_t n, Rng& rng);

/// x_i <- wrap(x_i + v_i dt).
void free_stream(ParticleConfig& cfg, double dt);

struct Snapshot {
    double t = 0.0;
    std::uint64_t hash = 0;
    Vec mean_velocity;
    /// N^{-1} sum |v_i|^2.
    double second_moment = 0.0;
    std::optional<ParticleConfig> config;
};

/// Records observables at fixed, strictly increasing times.
class TrajectoryRecorder {
  public:
    TrajectoryRecorder() = default;
    explicit TrajectoryRecorder(std::vector<double> times, bool keep_configs = false);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    void record(double t, const ParticleConfig& cfg);

  private:
    std::vector<double> times_;
    bool keep_configs_ = false;
    std::vector<Snapshot> snapshots_;
};

struct SimulationStats {
    std::uint64_t jumps = 0;
    /// Jumps whose target had a single contributing particle (velocity unchanged).
    std::uint64_t dirac_jumps = 0;
};

/// Exact event-driven simulation of the N-particle jump process up to t_end
/// (times measured from 0). Snapshots are taken at recorder times <= t_end.
SimulationStats simulate(ParticleConfig& cfg, const SmearingKernel& k, double t_end, Rng& rng,
                         TrajectoryRecorder* recorder = nullptr);

}  // namespace bgk
