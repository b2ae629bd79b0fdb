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
#include <optional>
#include <vector>

#include "fields.hpp"
#include "kernel.hpp"
#include "kinetic.hpp"
#include "particle_system.hpp"
#include "rng.hpp"

namespace bgk {

/// The pair process Q_N = (Z_N, Sigma_N) at time t.
struct CoupledConfig {
    ParticleConfig z;
    ParticleConfig sigma;
    double t = 0.0;
};

/// Diagonal start z = sigma = z0 at t = 0.
CoupledConfig diagonal_coupling(const ParticleConfig& z0);

void validate(const CoupledConfig& cc);

/// |x_j - y_j|^2 (minimal image) + |v_j - w_j|^2.
double pair_discrepancy(const CoupledConfig& cc, std::size_t j);
/// N^{-1} sum_j pair_discrepancy.
double mean_discrepancy(const CoupledConfig& cc);

/// Minimal-image difference x_j - y_j. When a coordinate sits exactly at
/// distance 1/2 the representative minimizing (v_j - w_j) . eta is used.
Vec position_difference(const CoupledConfig& cc, std::size_t j);

struct CoupledJump {
    HydroTriple empirical;  ///< Z_N fields at x_i + xi
    HydroTriple solver;     ///< g fields at y_i + xi
    Vec xi;
};

/// One joint jump of pair i at time cc.t: shared xi ~ phi, then the optimal
/// coupling of M^phi[Z_N](x_i + xi) and M^phi_g(y_i + xi, t).
CoupledJump coupled_jump(CoupledConfig& cc, const SmearingKernel& k, const FieldSeries& gfields, std::size_t i,
                         Rng& rng);

struct CoupledSnapshot {
    double t = 0.0;
    /// Per-replica N^{-1} sum of pair discrepancies.
    double discrepancy = 0.0;
    Vec z_mean_velocity;
    double z_second_moment = 0.0;
    Vec sigma_mean_velocity;
    double sigma_second_moment = 0.0;
    std::optional<GoodSetReport> good;
    std::optional<CoupledConfig> config;
};

struct CoupledOptions {
    std::vector<double> times;  ///< strictly increasing snapshot times
    std::optional<GoodSetParams> good_set;
    bool keep_configs = false;
};

struct CoupledRun {
    std::vector<CoupledSnapshot> snapshots;
    SimulationStats stats;
    CoupledConfig final_state;
};

/// Event-driven evolution of the pair with a global Exp(N) clock and a
/// uniformly drawn shared index.
CoupledRun simulate_coupled(CoupledConfig cc, const SmearingKernel& k, const FieldSeries& gfields, double t_end,
                            const CoupledOptions& options, Rng& rng);

struct CouplingRow {
    double t = 0.0;
    double IN_mean = 0.0;
    double IN_stderr = 0.0;
    double frac_BA = 0.0;  ///< frequency of the complement of B_A
    double frac_G1 = 0.0;  ///< frequency of the complement of G_1
    double frac_GM4 = 0.0; ///< frequency of the complement of the p = 4 moment set
    std::size_t replicas = 0;
};

struct CouplingStats {
    std::vector<CouplingRow> rows;
};

/// Mean over particles then replicas; stderr across replicas. Frequencies
/// are NaN when the runs did not carry good-set reports.
CouplingStats estimate_IN(const std::vector<CoupledRun>& replicas);
/// Single-time estimate from replica snapshots.
CouplingRow estimate_IN(const std::vector<CoupledConfig>& replicas);

/// "t,IN_mean,IN_stderr,frac_BA,frac_G1,frac_GM4,N,eps,replicas,seed".
void write_coupling_csv(std::ostream& out, const CouplingStats& stats, std::size_t n, double eps, std::uint64_t seed);

}  // namespace bgk
