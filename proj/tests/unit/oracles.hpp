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

// Independent reference computations used as test oracles. Nothing here calls
// into the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

/// min over integer shifts k in {-2..2}^d of |a - b + k|^2.
inline double torus_dist2(const double* a, const double* b, int d) {
    double best = 1e300;
    const int span = 5;
    int total = 1;
    for (int i = 0; i < d; ++i) total *= span;
    for (int code = 0; code < total; ++code) {
        int c = code;
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            int k = c % span - 2;
            c /= span;
            double diff = a[i] - b[i] + k;
            s += diff * diff;
        }
        best = std::min(best, s);
    }
    return best;
}

inline double bump(double s) {
    double q = 1.0 - 4.0 * s * s;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Mass of the unit-scale bump in dimension d by Simpson on the radial integral.
inline double bump_mass(int d) {
    double area = d == 1 ? 2.0 : d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    return area * simpson([d](double s) { return std::pow(s, d - 1) * bump(s); }, 0.0, 0.5, 200000);
}

/// phi^(eps)(r) with an independently computed normalization.
inline double phi(double r, double eps, int d, double mass) { return bump(r / eps) / (std::pow(eps, d) * mass); }

struct Fields {
    double rho = 0.0;
    std::vector<double> u;
    double T = 0.0;
};

/// Smeared fields by brute-force minimal-image sums in long double.
inline Fields smeared(const std::vector<double>& x, const std::vector<double>& v, int d, const double* at,
                      double eps, double mass) {
    const std::size_t n = x.size() / d;
    long double m0 = 0, e = 0;
    std::vector<long double> p(d, 0);
    for (std::size_t j = 0; j < n; ++j) {
        double w = phi(std::sqrt(torus_dist2(at, x.data() + j * d, d)), eps, d, mass);
        m0 += w;
        for (int a = 0; a < d; ++a) {
            p[a] += w * v[j * d + a];
            e += w * v[j * d + a] * v[j * d + a];
        }
    }
    Fields f;
    f.rho = static_cast<double>(m0 / n);
    f.u.assign(d, 0.0);
    if (m0 == 0) return f;
    long double u2 = 0;
    for (int a = 0; a < d; ++a) {
        f.u[a] = static_cast<double>(p[a] / m0);
        u2 += (p[a] / m0) * (p[a] / m0);
    }
    f.T = static_cast<double>(std::max<long double>(0, (e / m0 - u2) / d));
    return f;
}

/// Exact 1-D optimal transport cost between two discrete measures on the real
/// line (points sorted ascending, weights summing to one) by the north-west
/// corner rule on the monotone rearrangement.
inline double ot1d(const std::vector<double>& xa, std::vector<double> wa, const std::vector<double>& xb,
                   std::vector<double> wb) {
    std::size_t i = 0, j = 0;
    double cost = 0.0;
    while (i < xa.size() && j < xb.size()) {
        double m = std::min(wa[i], wb[j]);
        cost += m * (xa[i] - xb[j]) * (xa[i] - xb[j]);
        wa[i] -= m;
        wb[j] -= m;
        if (wa[i] <= 1e-300) ++i;
        if (wb[j] <= 1e-300) ++j;
    }
    return cost;
}

/// Minimum over all permutations of sum_i cost(i, perm(i)).
inline double brute_assignment(std::size_t n, const std::function<double(std::size_t, std::size_t)>& cost) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += cost(i, perm[i]);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanErr mean_err(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

/// Pearson chi-square statistic of observed counts against expected probabilities.
inline double chi_square(const std::vector<double>& counts, const std::vector<double>& probs) {
    double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double e = total * probs[i];
        s += (counts[i] - e) * (counts[i] - e) / e;
    }
    return s;
}

/// Upper 0.999 quantile of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi_square_q999(int k) {
    const double z = 3.090232;
    double a = 2.0 / (9.0 * k);
    return k * std::pow(1.0 - a + z * std::sqrt(a), 3);
}

}  // namespace oracle
