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
#include <string>
#include <vector>

#include "coupling.hpp"
#include "kernel.hpp"
#include "kinetic.hpp"
#include "particle_system.hpp"

namespace bgk {

struct ConstantsReport {
    double phi0 = 0.0;
    double grad_bound = 0.0;
    double r = 0.0;
    double A = 0.0;
    double A_phi = 0.0;
    /// Moment cap for p = 4 (0 when not supplied).
    double M = 0.0;
    double Gamma_phi = 0.0;
    double N_phi = 0.0;
};

/// (phi0^3 + |grad phi|^2) / (r^{5d} phi0^2).
double gamma_phi(double phi0, double grad_bound, double r, int dim);
/// phi0^4 / r^{6d} + |grad phi|^8 / (r^{5d} phi0^2)^4.
double n_phi(double phi0, double grad_bound, double r, int dim);

ConstantsReport constants_report(const SmearingKernel& k, double r, double horizon, double C2, double M = 0.0);

/// True when every N exceeds N_phi.
bool in_asymptotic_regime(const ConstantsReport& c, const std::vector<std::size_t>& n_list);

/// Inverse-transform sampling of the discrete (x, v) mass function of a grid
/// state, with a uniform jitter inside the cell of the drawn node.
class GridSampler {
  public:
    explicit GridSampler(const KineticState& s);
    ParticleConfig sample(std::size_t n, Rng& rng) const;
    const PhaseGrid& grid() const { return grid_; }

  private:
    PhaseGrid grid_;
    std::vector<double> cdf_;
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double ci_low = 0.0;   ///< 95% interval for the slope
    double ci_high = 0.0;
    std::size_t points = 0;
};

/// Least squares of log y on log x. NaN slope when fewer than two positive points.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct GridConfig {
    int nx = 32;
    int nv = 32;
    double vmax = 0.0;  ///< 0 selects auto_vmax of the initial law
    double dt = 0.01;
};

struct RunConfig {
    int dim = 2;
    std::vector<std::size_t> N{64, 128, 256, 512};
    std::vector<double> epsilon{0.25};
    double t_end = 0.5;
    /// Empty selects 0, t_end/4, ..., t_end.
    std::vector<double> snapshots;
    int replicas = 32;
    std::uint64_t seed = 1;
    GridConfig grid;
    InitialLaw initial;
    std::string output_dir;
    /// Points per cloud in the direct Wasserstein estimates.
    std::size_t w2_samples = 256;
    /// Record good-set indicators at the snapshots of coupled runs.
    bool good_set = true;
    /// solve: use the smearing kernel epsilon[0]; false selects the true BGK equation.
    bool regularized = true;

    std::vector<double> snapshot_times() const;
    PhaseGrid phase_grid() const;
};

void validate(const RunConfig& cfg);
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string to_json(const RunConfig& cfg);
std::string to_json(const ConstantsReport& c);

struct DirectW2 {
    double raw = 0.0;
    double stderr_raw = 0.0;
    /// Same estimator between two independent samples of the reference law.
    double floor = 0.0;
    double stderr_floor = 0.0;
    double debiased() const { return raw - floor; }
    std::size_t points = 0;
};

struct ChaosCell {
    std::size_t N = 0;
    double epsilon = 0.0;
    ConstantsReport constants;
    bool in_regime = false;
    CouplingStats stats;
    /// W2^2 between Z_N particles at t_end and i.i.d. draws from g(t_end).
    DirectW2 direct;
    std::uint64_t jumps = 0;
};

struct ChaosSweepResult {
    std::vector<ChaosCell> cells;
    /// One fit of log I_N(t_end) on log N per epsilon.
    std::vector<LogLogFit> fits;
};

ChaosSweepResult run_chaos_sweep(const RunConfig& cfg);

struct CutoffCell {
    double epsilon = 0.0;
    /// W2^2(f(t_end), g(t_end)) from i.i.d. clouds, averaged over replicas.
    DirectW2 w2;
};

struct CutoffSweepResult {
    std::vector<CutoffCell> cells;
    LogLogFit fit;
};

CutoffSweepResult run_cutoff_sweep(const RunConfig& cfg);

/// Solves from the configured initial law; writes fields.csv, bounds.csv and
/// state.bin when an output directory is set.
SolveResult run_solve(const RunConfig& cfg);

struct SimulateResult {
    ParticleConfig final_config;
    std::vector<Snapshot> snapshots;
    SimulationStats stats;
};

/// One particle-system run with N[0] particles and epsilon[0]; writes
/// snapshots.csv and final.csv when an output directory is set.
SimulateResult run_simulate(const RunConfig& cfg);

/// Frequency of the complement of B_A over `replicas` N-samples from a grid state.
struct GoodSetFrequency {
    std::size_t N = 0;
    std::size_t replicas = 0;
    std::size_t failures = 0;
    double frequency() const { return replicas ? static_cast<double>(failures) / replicas : 0.0; }
};

GoodSetFrequency density_event_frequency(const KineticState& g, const SmearingKernel& k, double r, double threshold,
                                         std::size_t n, std::size_t replicas, Rng rng);

/// Number of worker threads requested through BGK_THREADS (0 when unset).
int requested_threads();

}  // namespace bgk
