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

#include "fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace bgk {

namespace {

struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double value) {
        double y = value - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct Contribution {
    std::size_t j;
    double w;
};

/// Fields from the nonzero-weight contributions at one query point.
std::optional<HydroTriple> fields_from(const ParticleConfig& cfg, const std::vector<Contribution>& hits) {
    const int d = cfg.dim;
    const double n = static_cast<double>(cfg.size());
    Kahan mass;
    std::array<Kahan, kMaxDim> momentum;
    double vmax2 = 0.0;
    for (const auto& [j, w] : hits) {
        mass.add(w);
        const double* vj = cfg.v.data() + j * d;
        double v2 = 0.0;
        for (int a = 0; a < d; ++a) {
            momentum[a].add(w * vj[a]);
            v2 += vj[a] * vj[a];
        }
        vmax2 = std::max(vmax2, v2);
    }
    if (!(mass.sum > 0.0)) return std::nullopt;

    HydroTriple h;
    h.rho = mass.sum / n;
    h.u = Vec(d);
    h.contributors = hits.size();
    if (hits.size() == 1) {
        // single contributor: the local Maxwellian is the Dirac mass at its own velocity
        for (int a = 0; a < d; ++a) h.u[a] = cfg.v[hits.front().j * d + a];
        h.T = 0.0;
        return h;
    }
    for (int a = 0; a < d; ++a) h.u[a] = momentum[a].sum / mass.sum;
    Kahan spread;
    for (const auto& [j, w] : hits) {
        const double* vj = cfg.v.data() + j * d;
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
            double dv = vj[a] - h.u[a];
            s += dv * dv;
        }
        spread.add(w * s);
    }
    double spread_sum = std::max(spread.sum, 0.0);
    if (spread_sum <= 1e-14 * mass.sum * vmax2) spread_sum = 0.0;
    h.T = spread_sum / (mass.sum * d);
    return h;
}

thread_local std::vector<Contribution> tl_hits;

}  // namespace

std::optional<HydroTriple> smeared_fields(const ParticleConfig& cfg, const SmearingKernel& k, const double* x) {
    require(cfg.dim == k.dim(), "kernel and configuration dimensions differ");
    auto& hits = tl_hits;
    hits.clear();
    const int d = cfg.dim;
    const std::size_t n = cfg.size();
    for (std::size_t j = 0; j < n; ++j) {
        double w = k.eval_dist2(torus_dist2(x, cfg.x.data() + j * d, d));
        if (w > 0.0) hits.push_back({j, w});
    }
    return fields_from(cfg, hits);
}

std::optional<HydroTriple> smeared_fields(const ParticleConfig& cfg, const SmearingKernel& k, const TorusVector& x) {
    require(x.dim() == cfg.dim, "query point dimension mismatch");
    return smeared_fields(cfg, k, x.vec().c.data());
}

FieldEvaluator::FieldEvaluator(const ParticleConfig& cfg, const SmearingKernel& k) : cfg_(cfg), kernel_(k) {
    require(cfg.dim == k.dim(), "kernel and configuration dimensions differ");
    const int d = cfg.dim;
    cells_per_axis_ = static_cast<int>(std::floor(1.0 / k.support_radius()));
    if (cells_per_axis_ < 3) return;
    const int m = cells_per_axis_;
    std::size_t cells = 1;
    for (int a = 0; a < d; ++a) cells *= m;
    const std::size_t n = cfg.size();
    std::vector<std::size_t> owner(n);
    cell_start_.assign(cells + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t c = 0;
        for (int a = 0; a < d; ++a) {
            int idx = static_cast<int>((cfg.x[j * d + a] + 0.5) * m);
            idx = std::clamp(idx, 0, m - 1);
            c = c * m + idx;
        }
        owner[j] = c;
        ++cell_start_[c + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
    cell_items_.resize(n);
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t j = 0; j < n; ++j) cell_items_[fill[owner[j]]++] = j;
}

template <class Visit>
void FieldEvaluator::for_neighbors(const double* x, Visit&& visit) const {
    const int d = cfg_.dim;
    if (!uses_cells()) {
        for (std::size_t j = 0; j < cfg_.size(); ++j) visit(j);
        return;
    }
    const int m = cells_per_axis_;
    std::array<int, kMaxDim> home{};
    for (int a = 0; a < d; ++a) {
        double s = wrap_fast(x[a]);
        home[a] = std::clamp(static_cast<int>((s + 0.5) * m), 0, m - 1);
    }
    std::array<int, kMaxDim> off{};
    off.fill(-1);
    while (true) {
        std::size_t c = 0;
        for (int a = 0; a < d; ++a) c = c * m + static_cast<std::size_t>((home[a] + off[a] + m) % m);
        for (std::size_t p = cell_start_[c]; p < cell_start_[c + 1]; ++p) visit(cell_items_[p]);
        int a = 0;
        while (a < d && ++off[a] == 2) off[a++] = -1;
        if (a == d) break;
    }
}

std::optional<HydroTriple> FieldEvaluator::at(const double* x) const {
    auto& hits = tl_hits;
    hits.clear();
    const int d = cfg_.dim;
    for_neighbors(x, [&](std::size_t j) {
        double w = kernel_.eval_dist2(torus_dist2(x, cfg_.x.data() + j * d, d));
        if (w > 0.0) hits.push_back({j, w});
    });
    // match the index order of the direct sum
    std::sort(hits.begin(), hits.end(), [](const Contribution& a, const Contribution& b) { return a.j < b.j; });
    return fields_from(cfg_, hits);
}

std::optional<HydroTriple> FieldEvaluator::at(const TorusVector& x) const {
    require(x.dim() == cfg_.dim, "query point dimension mismatch");
    return at(x.vec().c.data());
}

double FieldEvaluator::density(const double* x) const {
    const int d = cfg_.dim;
    Kahan mass;
    for_neighbors(x, [&](std::size_t j) { mass.add(kernel_.eval_dist2(torus_dist2(x, cfg_.x.data() + j * d, d))); });
    return mass.sum / static_cast<double>(cfg_.size());
}

std::vector<double> jump_weights(const ParticleConfig& cfg, const SmearingKernel& k, std::size_t i, const TorusVector& xi) {
    require(cfg.dim == k.dim() && xi.dim() == cfg.dim, "dimension mismatch");
    require(i < cfg.size(), "particle index out of range");
    const int d = cfg.dim;
    const std::size_t n = cfg.size();
    Vec target(d);
    for (int a = 0; a < d; ++a) target[a] = wrap_coordinate(cfg.x[i * d + a] + xi[a]);
    std::vector<double> p(n);
    Kahan total;
    for (std::size_t j = 0; j < n; ++j) {
        p[j] = k.eval_dist2(torus_dist2(target.c.data(), cfg.x.data() + j * d, d));
        total.add(p[j]);
    }
    if (!(total.sum > 0.0)) fail(ErrorCode::Precondition, "jump weights undefined: smeared density vanishes at the target");
    for (double& w : p) w /= total.sum;
    return p;
}

DensityFloorResult density_exceeds_on_grid(const ParticleConfig& cfg, const SmearingKernel& k, double threshold,
                                           int points_per_axis, bool stop_at_first) {
    require(cfg.dim == k.dim(), "kernel and configuration dimensions differ");
    require(points_per_axis >= 1, "grid needs at least one node per axis");
    const int d = cfg.dim;
    const int m = points_per_axis;
    const double h = 1.0 / m;
    const double n = static_cast<double>(cfg.size());
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= m;

    DensityFloorResult result;
    result.grid_points = total;
    result.min_evaluated = std::numeric_limits<double>::infinity();

    // radius within which one particle alone lifts the density above the threshold
    double cert = 0.0;
    if (n * threshold < k.phi0()) {
        double lo = 0.0, hi = k.support_radius();
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            if (k.eval_radius(mid) / n > threshold) lo = mid;
            else hi = mid;
        }
        cert = lo * (1.0 - 1e-9);
    }

    std::vector<unsigned char> certified(total, 0);
    if (cert > 0.0) {
        const double cert2 = cert * cert;
        for (std::size_t j = 0; j < cfg.size(); ++j) {
            const double* y = cfg.x.data() + j * d;
            // walk the leading axes, fill a contiguous span along the last one
            std::array<long, kMaxDim> lo{}, hi{}, idx{};
            for (int a = 0; a + 1 < d; ++a) {
                lo[a] = static_cast<long>(std::ceil((y[a] - cert) / h));
                hi[a] = static_cast<long>(std::floor((y[a] + cert) / h));
                idx[a] = lo[a];
            }
            while (true) {
                double used = 0.0;
                std::size_t base = 0;
                for (int a = 0; a + 1 < d; ++a) {
                    double disp = idx[a] * h - y[a];
                    used += disp * disp;
                    base = base * m + static_cast<std::size_t>(((idx[a] % m) + m) % m);
                }
                if (used < cert2) {
                    const double rem = std::sqrt(cert2 - used);
                    const double yl = y[d - 1];
                    long s0 = static_cast<long>(std::ceil((yl - rem) / h));
                    long s1 = static_cast<long>(std::floor((yl + rem) / h));
                    if (s1 - s0 + 1 >= m) {
                        std::fill_n(certified.begin() + static_cast<long>(base * m), m, 1);
                    } else {
                        for (long s = s0; s <= s1; ++s) certified[base * m + static_cast<std::size_t>(((s % m) + m) % m)] = 1;
                    }
                }
                int a = 0;
                while (a + 1 < d && ++idx[a] > hi[a]) {
                    idx[a] = lo[a];
                    ++a;
                }
                if (a + 1 >= d) break;
            }
        }
    }

    FieldEvaluator eval(cfg, k);
    std::array<double, kMaxDim> node{};
    for (std::size_t c = 0; c < total; ++c) {
        if (certified[c]) continue;
        std::size_t rest = c;
        for (int a = d - 1; a >= 0; --a) {
            node[a] = wrap_fast(static_cast<double>(rest % m) * h);
            rest /= m;
        }
        double rho = eval.density(node.data());
        ++result.evaluated;
        result.min_evaluated = std::min(result.min_evaluated, rho);
        if (!(rho > threshold)) {
            result.above = false;
            if (stop_at_first) break;
        }
    }
    return result;
}

double good_set_A(double C2, double horizon) { return C2 * std::exp(-horizon) / 4.0; }

double good_set_A_phi(double A, double r, int dim, double phi0, double grad_bound) {
    return A * std::pow(r, dim) * phi0 / (2.0 * grad_bound);
}

GoodSetReport good_set_report(const ParticleConfig& z, const ParticleConfig& sigma, const SmearingKernel& k,
                              const GoodSetParams& params) {
    require(z.dim == sigma.dim && z.size() == sigma.size(), "Z_N and Sigma_N must have equal size and dimension");
    require(z.dim == k.dim(), "kernel dimension mismatch");
    require(params.r > 0.0 && params.r < 0.1, "partition scale must lie in (0, 1/10)");
    const double inv_r = 1.0 / params.r;
    require(std::abs(inv_r - std::round(inv_r)) < 1e-9, "partition scale must be the inverse of an integer");

    const int d = z.dim;
    const std::size_t n = z.size();
    GoodSetReport rep;
    rep.r = params.r;
    rep.A = good_set_A(params.C2, params.horizon);
    rep.A_phi = good_set_A_phi(rep.A, params.r, d, k.phi0(), k.grad_bound());
    rep.density_threshold = rep.A * std::pow(params.r, d) * k.phi0();

    const int nodes = 4 * static_cast<int>(std::lround(inv_r));
    const double spacing = 1.0 / nodes;
    rep.grid_slack = k.grad_bound() * spacing * std::sqrt(static_cast<double>(d)) / 2.0;
    rep.in_BA = density_exceeds_on_grid(sigma, k, rep.density_threshold, nodes).above;

    Kahan disp;
    for (std::size_t j = 0; j < n; ++j) disp.add(std::sqrt(torus_dist2(z.x.data() + j * d, sigma.x.data() + j * d, d)));
    rep.mean_displacement = disp.sum / static_cast<double>(n);
    rep.in_G1 = rep.mean_displacement <= rep.A_phi;

    for (const MomentCap& cap : params.caps) {
        Kahan moment;
        for (std::size_t j = 0; j < n; ++j) {
            double w2 = 0.0;
            for (int a = 0; a < d; ++a) w2 += sigma.v[j * d + a] * sigma.v[j * d + a];
            moment.add(std::pow(std::sqrt(w2), cap.p));
        }
        rep.M.push_back(cap.M);
        rep.in_GMp.push_back(moment.sum / static_cast<double>(n) <= cap.M);
    }
    return rep;
}

}  // namespace bgk
