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

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "fft.hpp"
#include "fields.hpp"
#include "kernel.hpp"
#include "particle_system.hpp"
#include "torus.hpp"

namespace bgk {

/// Periodic spatial grid x_i = -1/2 + i dx times the velocity box [-vmax, vmax]^d
/// with midpoint nodes v_j = -vmax + (j + 1/2) dv.
struct PhaseGrid {
    int dim = 2;
    int nx = 32;
    int nv = 32;
    double vmax = 8.0;

    double dx() const { return 1.0 / nx; }
    double dv() const { return 2.0 * vmax / nv; }
    std::size_t space_size() const;
    std::size_t velocity_size() const;
    std::size_t size() const { return space_size() * velocity_size(); }
    double x_node(int i) const { return -0.5 + i * dx(); }
    double v_node(int j) const { return -vmax + (j + 0.5) * dv(); }
    /// Velocity of flat node j (last axis fastest).
    Vec velocity(std::size_t j) const;
    Vec position(std::size_t s) const;

    bool operator==(const PhaseGrid&) const = default;
};

void validate(const PhaseGrid& grid);

/// u_max + 8 sqrt(T_max) for the Gaussian initial law.
double auto_vmax(const InitialLaw& law);

/// Nodal values of g(x, v, t), stored space-major: values[s * velocity_size() + j].
struct KineticState {
    PhaseGrid grid;
    std::vector<double> values;
    double t = 0.0;

    double& at(std::size_t s, std::size_t j) { return values[s * grid.velocity_size() + j]; }
    double at(std::size_t s, std::size_t j) const { return values[s * grid.velocity_size() + j]; }
};

KineticState state_from_function(const PhaseGrid& grid, const std::function<double(const Vec& x, const Vec& v)>& f);
/// f0 sampled at the nodes with its Maxwellian factor normalized to unit discrete mass.
KineticState initial_state(const PhaseGrid& grid, const InitialLaw& law);

/// Hydrodynamic fields on the spatial nodes.
struct FieldGrid {
    int dim = 2;
    int nx = 0;
    double t = 0.0;
    bool smeared = false;
    std::vector<double> rho;
    std::vector<double> u;  ///< dim entries per node
    std::vector<double> T;

    std::size_t size() const { return rho.size(); }
};

/// Velocity integrals per spatial node: rho, rho u and int |v|^2 g.
struct RawMoments {
    std::vector<double> rho;
    std::vector<double> momentum;
    std::vector<double> energy;
};

RawMoments raw_moments(const KineticState& s);

/// Plain fields (no smearing). Throws Error(Degenerate) where rho < 1e-14.
FieldGrid moments(const KineticState& s);

/// Discrete periodic convolution with phi sampled on the spatial grid and
/// rescaled to unit discrete mass, applied in Fourier space.
class SpatialSmoother {
  public:
    SpatialSmoother(int dim, int nx, const SmearingKernel& k);
    /// Convolves `components` interleaved fields stored node-major.
    void apply(std::vector<double>& data, int components) const;
    /// Discrete mass of the sampled kernel before rescaling.
    double raw_mass() const { return raw_mass_; }

  private:
    std::shared_ptr<PeriodicFFT> fft_;
    std::vector<double> transfer_;
    double raw_mass_ = 0.0;
};

/// Smeared fields rho^phi = phi * rho, rho^phi u^phi = phi * (rho u),
/// rho^phi (|u^phi|^2 + d T^phi) = phi * int |v|^2 g.
FieldGrid smear_fields(const KineticState& s, const SmearingKernel& k);

struct GlobalMoments {
    double mass = 0.0;
    Vec momentum;
    double energy = 0.0;
};

GlobalMoments global_moments(const KineticState& s);

/// Integral of |v|^p g over phase space.
double global_velocity_moment(const KineticState& s, int p);

/// sup_{x,v} g (1 + |v|^q) over the nodes.
double sup_moment_norm(const KineticState& s, int q);

struct SolverOptions {
    /// Values below -clip_tol after transport are clipped to zero and counted.
    double clip_tol = 1e-12;
    /// Values below -instability_tol * max g raise Error(Instability).
    double instability_tol = 1e-6;
    /// Maximum iterations when matching discrete Maxwellian moments.
    int match_iterations = 50;
};

struct StepDiagnostics {
    std::size_t clipped = 0;
    /// Spatial nodes whose discrete Maxwellian did not reach moment tolerance.
    std::size_t unmatched = 0;
    double most_negative = 0.0;

    StepDiagnostics& operator+=(const StepDiagnostics& o);
};

/// Lie-split semi-Lagrangian solver: exact spectral transport, then exact
/// relaxation towards rho M built from fields frozen at the relaxation start.
/// A null kernel selects the unregularized equation.
class KineticSolver {
  public:
    KineticSolver(const PhaseGrid& grid, const SmearingKernel* kernel, SolverOptions options = {});

    const PhaseGrid& grid() const { return grid_; }
    bool regularized() const { return kernel_.has_value(); }

    /// The fields the relaxation term uses: smeared when a kernel is present.
    FieldGrid relaxation_fields(const KineticState& s) const;

    StepDiagnostics transport(KineticState& s, double dt) const;
    StepDiagnostics relax(KineticState& s, const FieldGrid& fields, double dt) const;
    StepDiagnostics step(KineticState& s, double dt) const;

  private:
    PhaseGrid grid_;
    std::optional<SmearingKernel> kernel_;
    std::optional<SpatialSmoother> smoother_;
    SolverOptions options_;
    std::unique_ptr<PeriodicFFT> fft_;
};

/// Writes per-axis normalized Maxwellian factors (sum_j m[a][j] dv = 1) whose
/// discrete mean is u and whose summed discrete variance is d T. Returns false
/// when the iteration stopped short of tolerance.
bool matched_maxwellian_factors(const PhaseGrid& grid, const Vec& u, double T, int max_iterations,
                                std::vector<std::vector<double>>& factors);

/// Time-ordered field frames with linear-in-time, multilinear-in-space interpolation.
class FieldSeries {
  public:
    void push(FieldGrid frame);
    const std::vector<FieldGrid>& frames() const { return frames_; }
    bool empty() const { return frames_.empty(); }
    double t_begin() const;
    double t_end() const;
    /// Fields at (y, t); throws Error(OutOfRange) outside [t_begin, t_end].
    HydroTriple at(const double* y, double t) const;

  private:
    std::vector<FieldGrid> frames_;
};

struct BoundSample {
    double t = 0.0;
    double min_rho = 0.0;
    double min_rho_smeared = 0.0;
    double min_T = 0.0;
    double max_speed = 0.0;
    double max_T = 0.0;
    std::vector<double> sup_norms;  ///< one per q in BoundReport::q_orders
    GlobalMoments global;
    /// Global fourth velocity moment of g.
    double fourth_moment = 0.0;
};

struct BoundReport {
    double C2 = 0.0;
    std::vector<int> q_orders;
    std::vector<BoundSample> samples;

    /// Smallest temperature seen; the fitted lower bound A_t over the run.
    double min_temperature() const;
    /// min rho_g(t) >= C2 exp(-t) - tol at every sample.
    bool density_bound_holds(double tol) const;
};

struct SolveResult {
    KineticState state;
    FieldSeries series;
    BoundReport bounds;
    StepDiagnostics diagnostics;
};

/// Repeated steps of size dt (last step shortened) up to t_end.
SolveResult solve(const KineticState& s0, const SmearingKernel* k, double t_end, double dt, double C2 = 0.0,
                  SolverOptions options = {});

/// "t,ix1..ixd,rho,u1..ud,T" rows for every frame and node.
void write_fields_csv(std::ostream& out, const FieldSeries& series);

/// Binary checkpoint, little-endian:
///   char[8] "BGKSTATE" | u32 version (1) | u32 dim | u32 nx | u32 nv |
///   f64 vmax | f64 dx | f64 dv | f64 t | f64 values[nx^d * nv^d]
/// values are row-major over (x_1..x_d, v_1..v_d) with v_d fastest.
void write_checkpoint(std::ostream& out, const KineticState& s);
KineticState read_checkpoint(std::istream& in);

}  // namespace bgk
