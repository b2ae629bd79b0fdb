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

#include <array>
#include <span>

namespace bgk {

inline constexpr int kMaxDim = 3;

/// Small fixed-capacity real vector; `dim` components are meaningful.
struct Vec {
    std::array<double, kMaxDim> c{};
    int dim = 0;

    Vec() = default;
    explicit Vec(int d) : dim(d) {}
    Vec(std::initializer_list<double> values);
    static Vec from(std::span<const double> values);

    double& operator[](int k) { return c[k]; }
    double operator[](int k) const { return c[k]; }
    std::span<const double> span() const { return {c.data(), static_cast<std::size_t>(dim)}; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm(const Vec& a);

void check_dim(int dim);

/// Point or displacement on the unit torus, every coordinate in [-1/2, 1/2).
class TorusVector {
  public:
    TorusVector() = default;

    const Vec& vec() const { return v_; }
    int dim() const { return v_.dim; }
    double operator[](int k) const { return v_[k]; }
    /// Distance from the origin on the torus.
    double norm() const { return bgk::norm(v_); }

    friend TorusVector torus_wrap(std::span<const double> raw);
    friend TorusVector torus_wrap(const Vec& raw);

  private:
    explicit TorusVector(const Vec& v) : v_(v) {}
    Vec v_;
};

/// Reduces one coordinate into [-1/2, 1/2); +1/2 maps to -1/2.
double wrap_coordinate(double s);

TorusVector torus_wrap(std::span<const double> raw);
TorusVector torus_wrap(const Vec& raw);

/// Minimal-image displacement a - b.
TorusVector torus_difference(const TorusVector& a, const TorusVector& b);
double torus_distance(const TorusVector& a, const TorusVector& b);

/// Real lift eta of the torus class a - b with |eta| minimal. When several
/// lifts share the minimal norm (a coordinate sits exactly at 1/2) the one
/// minimizing dot(eta, tie_direction) is returned.
Vec minimal_lift(const TorusVector& a, const TorusVector& b, const Vec& tie_direction);

// Raw-array helpers used by the hot particle loops.
inline double wrap_fast(double s) {
    double w = s - static_cast<double>(static_cast<long long>(s + (s >= 0 ? 0.5 : -0.5)));
    if (w >= 0.5) w -= 1.0;
    if (w < -0.5) w += 1.0;
    return w;
}

inline double torus_dist2(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        double d = wrap_fast(a[k] - b[k]);
        s += d * d;
    }
    return s;
}

}  // namespace bgk
