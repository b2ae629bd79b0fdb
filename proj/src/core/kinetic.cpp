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

#include "kinetic.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "error.hpp"

namespace bgk {

namespace {

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

constexpr double kDensityFloor = 1e-14;

}  // namespace

std::size_t PhaseGrid::space_size() const { return ipow(static_cast<std::size_t>(nx), dim); }
std::size_t PhaseGrid::velocity_size() const { return ipow(static_cast<std::size_t>(nv), dim); }

Vec PhaseGrid::velocity(std::size_t j) const {
    Vec v(dim);
    for (int a = dim - 1; a >= 0; --a) {
        v[a] = v_node(static_cast<int>(j % nv));
        j /= nv;
    }
    return v;
}

Vec PhaseGrid::position(std::size_t s) const {
    Vec x(dim);
    for (int a = dim - 1; a >= 0; --a) {
        x[a] = x_node(static_cast<int>(s % nx));
        s /= nx;
    }
    return x;
}

void validate(const PhaseGrid& grid) {
    check_dim(grid.dim);
    require(grid.nx >= 2 && grid.nx % 2 == 0, "nx must be even and >= 2");
    require(grid.nv >= 2 && grid.nv % 2 == 0, "nv must be even and >= 2");
    require(grid.vmax > 0.0 && std::isfinite(grid.vmax), "vmax must be positive");
}

double auto_vmax(const InitialLaw& law) {
    double umax = 0.0;
    for (int a = 0; a < law.u0.dim; ++a) umax = std::max(umax, std::abs(law.u0[a]));
    return umax + 8.0 * std::sqrt(law.T0);
}

KineticState state_from_function(const PhaseGrid& grid, const std::function<double(const Vec& x, const Vec& v)>& f) {
    validate(grid);
    KineticState s;
    s.grid = grid;
    s.values.resize(grid.size());
    const std::size_t nvel = grid.velocity_size();
    for (std::size_t i = 0; i < grid.space_size(); ++i) {
        Vec x = grid.position(i);
        for (std::size_t j = 0; j < nvel; ++j) s.values[i * nvel + j] = f(x, grid.velocity(j));
    }
    return s;
}

KineticState initial_state(const PhaseGrid& grid, const InitialLaw& law) {
    validate(grid);
    validate(law);
    require(grid.dim == law.dim, "grid and initial law dimensions differ");
    const MaxwellianParams m{law.u0, law.T0};
    std::vector<double> mv(grid.velocity_size());
    double mass = 0.0;
    for (std::size_t j = 0; j < mv.size(); ++j) {
        mv[j] = maxwellian_pdf(m, grid.velocity(j));
        mass += mv[j];
    }
    mass *= std::pow(grid.dv(), grid.dim);
    KineticState s;
    s.grid = grid;
    s.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.space_size(); ++i) {
        const double rho = law.spatial_density(grid.position(i)[0]);
        for (std::size_t j = 0; j < mv.size(); ++j) s.values[i * mv.size() + j] = rho * mv[j] / mass;
    }
    return s;
}

RawMoments raw_moments(const KineticState& s) {
    const PhaseGrid& g = s.grid;
    const int d = g.dim;
    const std::size_t ns = g.space_size(), nvel = g.velocity_size();
    const double cell = std::pow(g.dv(), d);
    std::vector<Vec> vel(nvel);
    std::vector<double> speed2(nvel);
    for (std::size_t j = 0; j < nvel; ++j) {
        vel[j] = g.velocity(j);
        speed2[j] = norm2(vel[j]);
    }
    RawMoments m;
    m.rho.assign(ns, 0.0);
    m.momentum.assign(ns * d, 0.0);
    m.energy.assign(ns, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ns; ++i) {
        const double* gi = s.values.data() + i * nvel;
        double rho = 0.0, e = 0.0;
        std::array<double, kMaxDim> p{};
        for (std::size_t j = 0; j < nvel; ++j) {
            rho += gi[j];
            e += gi[j] * speed2[j];
            for (int a = 0; a < d; ++a) p[a] += gi[j] * vel[j][a];
        }
        m.rho[i] = rho * cell;
        m.energy[i] = e * cell;
        for (int a = 0; a < d; ++a) m.momentum[i * d + a] = p[a] * cell;
    }
    return m;
}

namespace {

FieldGrid fields_from_raw(const RawMoments& m, const PhaseGrid& g, double t, bool smeared) {
    const int d = g.dim;
    FieldGrid f;
    f.dim = d;
    f.nx = g.nx;
    f.t = t;
    f.smeared = smeared;
    const std::size_t ns = m.rho.size();
    f.rho = m.rho;
    f.u.assign(ns * d, 0.0);
    f.T.assign(ns, 0.0);
    for (std::size_t i = 0; i < ns; ++i) {
        const double rho = m.rho[i];
        if (!(rho >= kDensityFloor)) {
            std::ostringstream msg;
            msg << "density " << rho << " below floor at spatial node " << i << " (t = " << t << ")";
            fail(ErrorCode::Degenerate, msg.str());
        }
        double u2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double ua = m.momentum[i * d + a] / rho;
            f.u[i * d + a] = ua;
            u2 += ua * ua;
        }
        f.T[i] = std::max(0.0, (m.energy[i] / rho - u2) / d);
    }
    return f;
}

}  // namespace

FieldGrid moments(const KineticState& s) { return fields_from_raw(raw_moments(s), s.grid, s.t, false); }

SpatialSmoother::SpatialSmoother(int dim, int nx, const SmearingKernel& k)
    : fft_(std::make_shared<PeriodicFFT>(dim, nx)) {
    require(k.dim() == dim, "kernel dimension differs from the grid");
    const std::size_t ns = fft_->real_size();
    auto buf = fft_->alloc_real();
    const double dx = 1.0 / nx;
    double mass = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        std::size_t rest = s;
        double r2 = 0.0;
        for (int a = dim - 1; a >= 0; --a) {
            double off = wrap_fast(static_cast<double>(rest % nx) * dx);
            rest /= nx;
            r2 += off * off;
        }
        buf.data[s] = k.eval_dist2(r2);
        mass += buf.data[s];
    }
    raw_mass_ = mass * std::pow(dx, dim);
    if (!(mass > 0.0)) fail(ErrorCode::InvalidInput, "kernel is not resolved by the spatial grid (zero discrete mass)");
    auto spec = fft_->alloc_complex();
    fft_->forward(buf.data, spec.data);
    transfer_.resize(fft_->complex_size());
    // phi is even, so its DFT is real; dividing by the node sum gives unit discrete mass
    for (std::size_t c = 0; c < transfer_.size(); ++c) transfer_[c] = spec.data[c].real() / mass;
}

void SpatialSmoother::apply(std::vector<double>& data, int components) const {
    const std::size_t ns = fft_->real_size();
    require(data.size() == ns * static_cast<std::size_t>(components), "field size does not match the grid");
    auto in = fft_->alloc_real();
    auto spec = fft_->alloc_complex();
    const double inv_n = 1.0 / static_cast<double>(ns);
    for (int c = 0; c < components; ++c) {
        for (std::size_t s = 0; s < ns; ++s) in.data[s] = data[s * components + c];
        fft_->forward(in.data, spec.data);
        for (std::size_t k = 0; k < transfer_.size(); ++k) spec.data[k] *= transfer_[k] * inv_n;
        fft_->backward(spec.data, in.data);
        for (std::size_t s = 0; s < ns; ++s) data[s * components + c] = in.data[s];
    }
}

namespace {

FieldGrid smear_with(const KineticState& s, const SpatialSmoother& smoother) {
    RawMoments m = raw_moments(s);
    smoother.apply(m.rho, 1);
    smoother.apply(m.momentum, s.grid.dim);
    smoother.apply(m.energy, 1);
    return fields_from_raw(m, s.grid, s.t, true);
}

}  // namespace

FieldGrid smear_fields(const KineticState& s, const SmearingKernel& k) {
    SpatialSmoother smoother(s.grid.dim, s.grid.nx, k);
    return smear_with(s, smoother);
}

GlobalMoments global_moments(const KineticState& s) {
    RawMoments m = raw_moments(s);
    const int d = s.grid.dim;
    const double cell = std::pow(s.grid.dx(), d);
    GlobalMoments gm;
    gm.momentum = Vec(d);
    for (std::size_t i = 0; i < m.rho.size(); ++i) {
        gm.mass += m.rho[i];
        gm.energy += m.energy[i];
        for (int a = 0; a < d; ++a) gm.momentum[a] += m.momentum[i * d + a];
    }
    gm.mass *= cell;
    gm.energy *= cell;
    gm.momentum *= cell;
    return gm;
}

double global_velocity_moment(const KineticState& s, int p) {
    const std::size_t nvel = s.grid.velocity_size();
    std::vector<double> weight(nvel);
    for (std::size_t j = 0; j < nvel; ++j) weight[j] = std::pow(norm(s.grid.velocity(j)), p);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.grid.space_size(); ++i) {
        const double* gi = s.values.data() + i * nvel;
        double local = 0.0;
        for (std::size_t j = 0; j < nvel; ++j) local += gi[j] * weight[j];
        sum += local;
    }
    return sum * std::pow(s.grid.dx() * s.grid.dv(), s.grid.dim);
}

double sup_moment_norm(const KineticState& s, int q) {
    const std::size_t nvel = s.grid.velocity_size();
    std::vector<double> weight(nvel);
    for (std::size_t j = 0; j < nvel; ++j) weight[j] = 1.0 + std::pow(norm(s.grid.velocity(j)), q);
    double sup = 0.0;
    for (std::size_t p = 0; p < s.values.size(); ++p) sup = std::max(sup, s.values[p] * weight[p % nvel]);
    return sup;
}

StepDiagnostics& StepDiagnostics::operator+=(const StepDiagnostics& o) {
    clipped += o.clipped;
    unmatched += o.unmatched;
    most_negative = std::min(most_negative, o.most_negative);
    return *this;
}

bool matched_maxwellian_factors(const PhaseGrid& grid, const Vec& u, double T, int max_iterations,
                                std::vector<std::vector<double>>& factors) {
    const int d = grid.dim;
    const int nv = grid.nv;
    const double dv = grid.dv();
    if (!(T > 0.0)) fail(ErrorCode::Degenerate, "relaxation temperature vanished");
    factors.resize(d);
    for (auto& f : factors) f.resize(nv);

    Vec shift = u;
    double temp = T;
    std::array<double, kMaxDim> mean{}, var{}, mass{};
    bool converged = false;
    for (int it = 0; it <= max_iterations; ++it) {
        double total_var = 0.0;
        double worst_mean = 0.0;
        for (int a = 0; a < d; ++a) {
            double z = 0.0, s1 = 0.0, s2 = 0.0;
            double c_min2 = std::numeric_limits<double>::infinity();
            for (int j = 0; j < nv; ++j) c_min2 = std::min(c_min2, std::pow(grid.v_node(j) - shift[a], 2));
            for (int j = 0; j < nv; ++j) {
                double c = grid.v_node(j) - shift[a];
                double w = std::exp(-(c * c - c_min2) / (2.0 * temp));
                factors[a][j] = w;
                z += w;
                s1 += w * c;
                s2 += w * c * c;
            }
            if (!(z > 0.0)) fail(ErrorCode::Degenerate, "discrete Maxwellian has no mass on the velocity grid");
            mass[a] = z;
            double m1 = s1 / z;
            mean[a] = shift[a] + m1;
            var[a] = s2 / z - m1 * m1;
            total_var += var[a];
            worst_mean = std::max(worst_mean, std::abs(mean[a] - u[a]) / (std::abs(u[a]) + std::sqrt(T)));
        }
        if (worst_mean <= 1e-14 && std::abs(total_var - d * T) <= 1e-14 * d * T) {
            converged = true;
            break;
        }
        if (it == max_iterations || !(total_var > 0.0)) break;
        for (int a = 0; a < d; ++a) shift[a] += u[a] - mean[a];
        temp *= d * T / total_var;
        if (!(temp > std::numeric_limits<double>::min())) break;
    }
    for (int a = 0; a < d; ++a) {
        const double norm_factor = 1.0 / (mass[a] * dv);
        for (int j = 0; j < nv; ++j) factors[a][j] *= norm_factor;
    }
    return converged;
}

KineticSolver::KineticSolver(const PhaseGrid& grid, const SmearingKernel* kernel, SolverOptions options)
    : grid_(grid), options_(options) {
    validate(grid);
    fft_ = std::make_unique<PeriodicFFT>(grid.dim, grid.nx);
    if (kernel) {
        require(kernel->dim() == grid.dim, "kernel dimension differs from the grid");
        kernel_ = *kernel;
        smoother_.emplace(grid.dim, grid.nx, *kernel);
    }
}

FieldGrid KineticSolver::relaxation_fields(const KineticState& s) const {
    require(s.grid == grid_, "state grid differs from the solver grid");
    if (smoother_) return smear_with(s, *smoother_);
    return moments(s);
}

StepDiagnostics KineticSolver::transport(KineticState& s, double dt) const {
    require(s.grid == grid_, "state grid differs from the solver grid");
    const int d = grid_.dim;
    const int nx = grid_.nx;
    const std::size_t ns = grid_.space_size(), nvel = grid_.velocity_size();
    const int last = fft_->last_extent();
    const double inv_n = 1.0 / static_cast<double>(ns);
    const double two_pi = 2.0 * std::numbers::pi;

    double gmax = 0.0;
    for (double val : s.values) gmax = std::max(gmax, std::abs(val));

    StepDiagnostics diag;
    bool unstable = false;
#pragma omp parallel
    {
        auto buf = fft_->alloc_real();
        auto spec = fft_->alloc_complex();
        std::vector<std::vector<std::complex<double>>> phase(d, std::vector<std::complex<double>>(nx));
        StepDiagnostics local;
#pragma omp for schedule(static)
        for (std::size_t j = 0; j < nvel; ++j) {
            const Vec v = grid_.velocity(j);
            for (int a = 0; a < d; ++a) {
                // displacement in units of the torus side
                const double shift = v[a] * dt;
                for (int i = 0; i < nx; ++i) {
                    const int k = signed_frequency(i, nx);
                    const double theta = two_pi * k * shift;
                    phase[a][i] = (2 * i == nx) ? std::complex<double>(std::cos(theta), 0.0)
                                                : std::complex<double>(std::cos(theta), -std::sin(theta));
                }
            }
            for (std::size_t i = 0; i < ns; ++i) buf.data[i] = s.values[i * nvel + j];
            fft_->forward(buf.data, spec.data);
            for (std::size_t c = 0; c < fft_->complex_size(); ++c) {
                std::size_t rest = c;
                std::complex<double> f = phase[d - 1][rest % last];
                rest /= last;
                for (int a = d - 2; a >= 0; --a) {
                    f *= phase[a][rest % nx];
                    rest /= nx;
                }
                spec.data[c] *= f * inv_n;
            }
            fft_->backward(spec.data, buf.data);
            for (std::size_t i = 0; i < ns; ++i) {
                double val = buf.data[i];
                if (val < -options_.clip_tol) {
                    local.most_negative = std::min(local.most_negative, val);
                    if (val < -options_.instability_tol * gmax) unstable = true;
                    ++local.clipped;
                    val = 0.0;
                }
                s.values[i * nvel + j] = val;
            }
        }
#pragma omp critical
        diag += local;
    }
    if (unstable) {
        std::ostringstream msg;
        msg << "transport produced value " << diag.most_negative << " (max |g| = " << gmax << ")";
        fail(ErrorCode::Instability, msg.str());
    }
    return diag;
}

StepDiagnostics KineticSolver::relax(KineticState& s, const FieldGrid& fields, double dt) const {
    require(s.grid == grid_, "state grid differs from the solver grid");
    const int d = grid_.dim;
    const int nv = grid_.nv;
    const std::size_t ns = grid_.space_size(), nvel = grid_.velocity_size();
    const double keep = std::exp(-dt);
    const double gain = -std::expm1(-dt);
    StepDiagnostics diag;
    std::size_t unmatched = 0;
#pragma omp parallel
    {
        std::vector<std::vector<double>> factors;
        std::vector<double> target(nvel);
#pragma omp for schedule(static) reduction(+ : unmatched)
        for (std::size_t i = 0; i < ns; ++i) {
            Vec u(d);
            for (int a = 0; a < d; ++a) u[a] = fields.u[i * d + a];
            if (!matched_maxwellian_factors(grid_, u, fields.T[i], options_.match_iterations, factors)) ++unmatched;
            const double rho = fields.rho[i];
            for (std::size_t j = 0; j < nvel; ++j) {
                std::size_t rest = j;
                double m = 1.0;
                for (int a = d - 1; a >= 0; --a) {
                    m *= factors[a][rest % nv];
                    rest /= nv;
                }
                target[j] = rho * m;
            }
            double* gi = s.values.data() + i * nvel;
            for (std::size_t j = 0; j < nvel; ++j) gi[j] = keep * gi[j] + gain * target[j];
        }
    }
    diag.unmatched = unmatched;
    return diag;
}

StepDiagnostics KineticSolver::step(KineticState& s, double dt) const {
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    StepDiagnostics diag = transport(s, dt);
    FieldGrid fields = relaxation_fields(s);
    diag += relax(s, fields, dt);
    s.t += dt;
    return diag;
}

void FieldSeries::push(FieldGrid frame) {
    if (!frames_.empty()) {
        require(frame.t > frames_.back().t, "field frames must have increasing times");
        require(frame.nx == frames_.back().nx && frame.dim == frames_.back().dim, "field frames differ in shape");
    }
    frames_.push_back(std::move(frame));
}

double FieldSeries::t_begin() const {
    require(!frames_.empty(), "empty field series");
    return frames_.front().t;
}

double FieldSeries::t_end() const {
    require(!frames_.empty(), "empty field series");
    return frames_.back().t;
}

namespace {

struct Stencil {
    std::array<std::size_t, 8> node{};
    std::array<double, 8> weight{};
    int count = 0;
};

Stencil multilinear(const double* y, int dim, int nx) {
    std::array<int, kMaxDim> i0{};
    std::array<double, kMaxDim> frac{};
    for (int a = 0; a < dim; ++a) {
        double p = (wrap_fast(y[a]) + 0.5) * nx;
        double fl = std::floor(p);
        frac[a] = p - fl;
        i0[a] = static_cast<int>(fl) % nx;
    }
    Stencil st;
    st.count = 1 << dim;
    for (int corner = 0; corner < st.count; ++corner) {
        std::size_t flat = 0;
        double w = 1.0;
        for (int a = 0; a < dim; ++a) {
            int bit = (corner >> a) & 1;
            flat = flat * nx + static_cast<std::size_t>((i0[a] + bit) % nx);
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        st.node[corner] = flat;
        st.weight[corner] = w;
    }
    return st;
}

}  // namespace

HydroTriple FieldSeries::at(const double* y, double t) const {
    require(!frames_.empty(), "empty field series");
    const double tol = 1e-12 * std::max(1.0, std::abs(t_end()));
    if (t < t_begin() - tol || t > t_end() + tol) {
        std::ostringstream msg;
        msg << "time " << t << " outside the field series range [" << t_begin() << ", " << t_end() << "]";
        fail(ErrorCode::OutOfRange, msg.str());
    }
    auto upper = std::lower_bound(frames_.begin(), frames_.end(), t, [](const FieldGrid& f, double tt) { return f.t < tt; });
    std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(upper - frames_.begin()), frames_.size() - 1);
    std::size_t lo = hi == 0 ? 0 : hi - 1;
    double theta = 0.0;
    if (hi != lo) theta = std::clamp((t - frames_[lo].t) / (frames_[hi].t - frames_[lo].t), 0.0, 1.0);

    const int d = frames_.front().dim;
    const Stencil st = multilinear(y, d, frames_.front().nx);
    HydroTriple out;
    out.u = Vec(d);
    for (int frame = 0; frame < 2; ++frame) {
        const FieldGrid& f = frames_[frame == 0 ? lo : hi];
        const double wt = frame == 0 ? 1.0 - theta : theta;
        if (wt == 0.0) continue;
        for (int c = 0; c < st.count; ++c) {
            const double w = wt * st.weight[c];
            const std::size_t n = st.node[c];
            out.rho += w * f.rho[n];
            out.T += w * f.T[n];
            for (int a = 0; a < d; ++a) out.u[a] += w * f.u[n * d + a];
        }
    }
    return out;
}

double BoundReport::min_temperature() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) m = std::min(m, s.min_T);
    return m;
}

bool BoundReport::density_bound_holds(double tol) const {
    for (const auto& s : samples) {
        if (s.min_rho < C2 * std::exp(-s.t) - tol) return false;
    }
    return true;
}

namespace {

BoundSample sample_bounds(const KineticState& s, const FieldGrid& relax_fields, const std::vector<int>& q_orders) {
    BoundSample b;
    b.t = s.t;
    RawMoments m = raw_moments(s);
    b.min_rho = *std::min_element(m.rho.begin(), m.rho.end());
    b.min_rho_smeared = *std::min_element(relax_fields.rho.begin(), relax_fields.rho.end());
    b.min_T = *std::min_element(relax_fields.T.begin(), relax_fields.T.end());
    b.max_T = *std::max_element(relax_fields.T.begin(), relax_fields.T.end());
    const int d = s.grid.dim;
    for (std::size_t i = 0; i < relax_fields.size(); ++i) {
        double u2 = 0.0;
        for (int a = 0; a < d; ++a) u2 += relax_fields.u[i * d + a] * relax_fields.u[i * d + a];
        b.max_speed = std::max(b.max_speed, std::sqrt(u2));
    }
    for (int q : q_orders) b.sup_norms.push_back(sup_moment_norm(s, q));
    b.global = global_moments(s);
    b.fourth_moment = global_velocity_moment(s, 4);
    return b;
}

}  // namespace

SolveResult solve(const KineticState& s0, const SmearingKernel* k, double t_end, double dt, double C2,
                  SolverOptions options) {
    require(t_end >= 0.0 && std::isfinite(t_end), "t_end must be finite and nonnegative");
    require(dt > 0.0, "time step must be positive");
    KineticSolver solver(s0.grid, k, options);
    SolveResult result;
    result.state = s0;
    const int d = s0.grid.dim;
    result.bounds.C2 = C2;
    result.bounds.q_orders = {d + 2, d + 3, d + 4};

    const double t0 = s0.t;
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    for (long n = 0;; ++n) {
        FieldGrid fields = solver.relaxation_fields(result.state);
        result.bounds.samples.push_back(sample_bounds(result.state, fields, result.bounds.q_orders));
        result.series.push(std::move(fields));
        if (n >= steps) break;
        double h = std::min(dt, t0 + t_end - result.state.t);
        if (n == steps - 1) h = t0 + t_end - result.state.t;
        result.diagnostics += solver.step(result.state, h);
        if (n == steps - 1) result.state.t = t0 + t_end;
    }
    return result;
}

void write_fields_csv(std::ostream& out, const FieldSeries& series) {
    if (series.empty()) return;
    const int d = series.frames().front().dim;
    const int nx = series.frames().front().nx;
    out << "t";
    for (int a = 0; a < d; ++a) out << ",ix" << a + 1;
    out << ",rho";
    for (int a = 0; a < d; ++a) out << ",u" << a + 1;
    out << ",T\n";
    out.precision(17);
    for (const FieldGrid& f : series.frames()) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            out << f.t;
            std::array<int, kMaxDim> idx{};
            std::size_t rest = i;
            for (int a = d - 1; a >= 0; --a) {
                idx[a] = static_cast<int>(rest % nx);
                rest /= nx;
            }
            for (int a = 0; a < d; ++a) out << ',' << idx[a];
            out << ',' << f.rho[i];
            for (int a = 0; a < d; ++a) out << ',' << f.u[i * d + a];
            out << ',' << f.T[i] << '\n';
        }
    }
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in) fail(ErrorCode::Io, "truncated checkpoint");
    return value;
}

constexpr char kMagic[8] = {'B', 'G', 'K', 'S', 'T', 'A', 'T', 'E'};

}  // namespace

void write_checkpoint(std::ostream& out, const KineticState& s) {
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.dim));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.nx));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.nv));
    put<double>(out, s.grid.vmax);
    put<double>(out, s.grid.dx());
    put<double>(out, s.grid.dv());
    put<double>(out, s.t);
    out.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    if (!out) fail(ErrorCode::Io, "failed writing checkpoint");
}

KineticState read_checkpoint(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) fail(ErrorCode::Io, "not a BGKSTATE checkpoint");
    if (get<std::uint32_t>(in) != 1) fail(ErrorCode::Io, "unsupported checkpoint version");
    KineticState s;
    s.grid.dim = static_cast<int>(get<std::uint32_t>(in));
    s.grid.nx = static_cast<int>(get<std::uint32_t>(in));
    s.grid.nv = static_cast<int>(get<std::uint32_t>(in));
    s.grid.vmax = get<double>(in);
    get<double>(in);  // dx and dv are derived from the fields above
    get<double>(in);
    s.t = get<double>(in);
    validate(s.grid);
    s.values.resize(s.grid.size());
    in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    if (!in) fail(ErrorCode::Io, "truncated checkpoint payload");
    return s;
}

}  // namespace bgk
