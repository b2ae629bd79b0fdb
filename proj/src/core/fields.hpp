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
#include <optional>
#include <vector>

#include "kernel.hpp"
#include "particles_config.hpp"

namespace bgk {

/// Local density, bulk velocity and temperature.
struct HydroTriple {
    double rho = 0.0;
    Vec u;
    double T = 0.0;
    /// Particles with nonzero kernel weight at the query point.
    std::size_t contributors = 0;
};

/// Smeared empirical fields at x by direct summation over all particles.
/// Returns nullopt where the smeared density vanishes.
std::optional<HydroTriple> smeared_fields(const ParticleConfig& cfg, const SmearingKernel& k, const TorusVector& x);
std::optional<HydroTriple> smeared_fields(const ParticleConfig& cfg, const SmearingKernel& k, const double* x);

/// Cell-list accelerated evaluator over an immutable snapshot. Falls back to
/// direct summation when the support is too wide for a 3-cell stencil.
class FieldEvaluator {
  public:
    FieldEvaluator(const ParticleConfig& cfg, const SmearingKernel& k);

    std::optional<HydroTriple> at(const TorusVector& x) const;
    std::optional<HydroTriple> at(const double* x) const;
    /// N^{-1} sum_j phi(x - x_j).
    double density(const double* x) const;

    bool uses_cells() const { return cells_per_axis_ >= 3; }

  private:
    template <class Visit>
    void for_neighbors(const double* x, Visit&& visit) const;

    const ParticleConfig& cfg_;
    const SmearingKernel& kernel_;
    int cells_per_axis_ = 0;
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> cell_items_;
};

/// p_{i,j}(xi) = phi(x_i + xi - x_j) / sum_k phi(x_i + xi - x_k).
/// Throws Error(Precondition) when the denominator vanishes.
std::vector<double> jump_weights(const ParticleConfig& cfg, const SmearingKernel& k, std::size_t i, const TorusVector& xi);

struct DensityFloorResult {
    bool above = true;
    std::size_t grid_points = 0;
    /// Nodes that needed a full kernel sum (the rest were certified by a single nearby particle).
    std::size_t evaluated = 0;
    /// Smallest density among evaluated nodes (+inf when none was evaluated).
    double min_evaluated = 0.0;
};

/// Checks N^{-1} sum_j phi(x - x_j) > threshold at every node of the
/// `points_per_axis`^d grid with node 0 at the origin. Same answer as summing
/// at every node; nodes within the certification radius of a particle are skipped.
DensityFloorResult density_exceeds_on_grid(const ParticleConfig& cfg, const SmearingKernel& k, double threshold,
                                           int points_per_axis, bool stop_at_first = true);

struct MomentCap {
    int p = 4;
    double M = 0.0;
};

struct GoodSetParams {
    double r = 0.0;        ///< partition scale
    double horizon = 0.0;  ///< time horizon T of the run
    double C2 = 0.0;       ///< lower mass constant of the initial datum
    std::vector<MomentCap> caps;
};

struct GoodSetReport {
    bool in_BA = false;
    bool in_G1 = false;
    std::vector<bool> in_GMp;
    double A = 0.0;
    double A_phi = 0.0;
    double r = 0.0;
    std::vector<double> M;
    /// N^{-1} sum_j |x_j - y_j|.
    double mean_displacement = 0.0;
    /// Threshold A r^d phi0 the density must exceed.
    double density_threshold = 0.0;
    /// Largest possible dip of the density between verification nodes (Lipschitz margin).
    double grid_slack = 0.0;

    bool in_G() const { return in_G1 && in_BA; }
};

/// Good-set indicators for the pair (Z_N, Sigma_N); the density event is
/// certified on a grid of spacing r/4.
GoodSetReport good_set_report(const ParticleConfig& z, const ParticleConfig& sigma, const SmearingKernel& k,
                              const GoodSetParams& params);

/// A = C2 exp(-T) / 4.
double good_set_A(double C2, double horizon);
/// A_phi = A r^d phi0 / (2 sup|grad phi|).
double good_set_A_phi(double A, double r, int dim, double phi0, double grad_bound);

}  // namespace bgk
