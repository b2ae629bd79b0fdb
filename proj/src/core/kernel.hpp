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

#include <memory>
#include <string>

#include "rng.hpp"
#include "torus.hpp"

namespace bgk {

/// Unnormalized radial profile h on the unit-scale kernel, supported in |x| < 1/2.
class RadialProfile {
  public:
    virtual ~RadialProfile() = default;
    virtual std::string name() const = 0;
    /// h evaluated at |x|^2 = s2; must vanish for s2 >= 1/4.
    virtual double value_sq(double s2) const = 0;
    double value(double s) const { return value_sq(s * s); }
};

/// exp(-1 / (1 - (2s)^2)) for s < 1/2, else 0.
class BumpProfile final : public RadialProfile {
  public:
    std::string name() const override { return "bump"; }
    double value_sq(double s2) const override;
};

std::shared_ptr<const RadialProfile> make_profile(const std::string& name);

struct KernelSpec {
    std::string profile = "bump";
    double epsilon = 1.0;
    int dim = 2;
    /// Relative tolerance of the normalization quadrature.
    double quad_tol = 1e-12;
    /// Radial grid used when estimating sup |grad phi|.
    int grad_grid = 20000;
};

/// The smearing function phi^(eps)(x) = eps^-d phibar(x / eps) with phibar the
/// normalized radial profile. Immutable; cheap to copy.
class SmearingKernel {
  public:
    static SmearingKernel build(const KernelSpec& spec);

    const KernelSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    double epsilon() const { return spec_.epsilon; }
    double phi0() const { return phi0_; }
    double grad_bound() const { return grad_bound_; }
    double support_radius() const { return support_radius_; }
    /// Integral of the unit-scale profile; phibar = h / normalization.
    double normalization() const { return normalization_; }

    double eval(const TorusVector& x) const { return eval_dist2(norm2(x.vec())); }
    /// phi at a displacement of squared (minimal-image) length r2.
    double eval_dist2(double r2) const {
        if (r2 >= support_radius2_) return 0.0;
        return scale_ * profile_->value_sq(r2 * inv_eps2_);
    }
    double eval_radius(double rho) const { return eval_dist2(rho * rho); }

    /// Draw xi with density phi by rejection from the cube circumscribing the support.
    TorusVector sample(Rng& rng) const;

  private:
    SmearingKernel() = default;

    KernelSpec spec_;
    std::shared_ptr<const RadialProfile> profile_;
    double normalization_ = 0.0;
    double scale_ = 0.0;
    double inv_eps2_ = 0.0;
    double phi0_ = 0.0;
    double grad_bound_ = 0.0;
    double support_radius_ = 0.0;
    double support_radius2_ = 0.0;
};

/// True when phi(x) > phi0 / 2 at every node of a `points_per_axis`^d grid
/// spanning the closed cube [-5r, 5r]^d.
bool partition_predicate_holds(const SmearingKernel& k, double r, int points_per_axis);

/// Largest r = 1/n < 1/10 such that phi > phi0 / 2 on [-5r, 5r]^d. Throws
/// Error(NoScale) when no n <= max_inverse works.
double compute_partition_scale(const SmearingKernel& k, int max_inverse = 100000, int points_per_axis = 41);

}  // namespace bgk
