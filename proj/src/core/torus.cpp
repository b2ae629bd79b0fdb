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

#include "torus.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace bgk {

Vec::Vec(std::initializer_list<double> values) {
    require(values.size() >= 1 && values.size() <= kMaxDim, "vector dimension must be 1..3");
    dim = static_cast<int>(values.size());
    int k = 0;
    for (double x : values) c[k++] = x;
}

Vec Vec::from(std::span<const double> values) {
    require(!values.empty() && values.size() <= kMaxDim, "vector dimension must be 1..3");
    Vec v(static_cast<int>(values.size()));
    for (int k = 0; k < v.dim; ++k) v.c[k] = values[k];
    return v;
}

Vec& Vec::operator+=(const Vec& o) {
    require(dim == o.dim, "dimension mismatch");
    for (int k = 0; k < dim; ++k) c[k] += o.c[k];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    require(dim == o.dim, "dimension mismatch");
    for (int k = 0; k < dim; ++k) c[k] -= o.c[k];
    return *this;
}

Vec& Vec::operator*=(double s) {
    for (int k = 0; k < dim; ++k) c[k] *= s;
    return *this;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double s, Vec a) { return a *= s; }

double dot(const Vec& a, const Vec& b) {
    require(a.dim == b.dim, "dimension mismatch");
    double s = 0.0;
    for (int k = 0; k < a.dim; ++k) s += a.c[k] * b.c[k];
    return s;
}

double norm2(const Vec& a) { return dot(a, a); }
double norm(const Vec& a) { return std::sqrt(norm2(a)); }

void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) fail(ErrorCode::InvalidInput, "dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

double wrap_coordinate(double s) {
    if (!std::isfinite(s)) fail(ErrorCode::InvalidInput, "non-finite torus coordinate");
    double w = s - std::floor(s + 0.5);
    // floor can round s + 0.5 up for tiny negative s, leaving w == 0.5
    if (w >= 0.5) w -= 1.0;
    if (w < -0.5) w += 1.0;
    return w;
}

TorusVector torus_wrap(std::span<const double> raw) {
    check_dim(static_cast<int>(raw.size()));
    Vec v(static_cast<int>(raw.size()));
    for (int k = 0; k < v.dim; ++k) v[k] = wrap_coordinate(raw[k]);
    return TorusVector(v);
}

TorusVector torus_wrap(const Vec& raw) { return torus_wrap(raw.span()); }

TorusVector torus_difference(const TorusVector& a, const TorusVector& b) {
    require(a.dim() == b.dim(), "torus dimension mismatch");
    return torus_wrap(a.vec() - b.vec());
}

double torus_distance(const TorusVector& a, const TorusVector& b) { return torus_difference(a, b).norm(); }

Vec minimal_lift(const TorusVector& a, const TorusVector& b, const Vec& tie_direction) {
    Vec eta = torus_difference(a, b).vec();
    require(tie_direction.dim == eta.dim, "dimension mismatch");
    for (int k = 0; k < eta.dim; ++k) {
        // -1/2 and +1/2 are the two minimal lifts of the same class
        if (eta[k] == -0.5 && tie_direction[k] < 0.0) eta[k] = 0.5;
    }
    return eta;
}

}  // namespace bgk
