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

#include <complex>
#include <cstddef>
#include <memory>

namespace bgk {

/// Real <-> half-complex DFT on an n^d periodic grid (row-major, last axis
/// fastest), backed by FFTW. Plans are built once; transforms may run
/// concurrently on distinct buffers obtained from alloc_*.
class PeriodicFFT {
  public:
    PeriodicFFT(int dim, int n);
    ~PeriodicFFT();
    PeriodicFFT(const PeriodicFFT&) = delete;
    PeriodicFFT& operator=(const PeriodicFFT&) = delete;

    int dim() const { return dim_; }
    int n() const { return n_; }
    std::size_t real_size() const { return real_size_; }
    std::size_t complex_size() const { return complex_size_; }
    /// Number of stored entries along the last (halved) axis.
    int last_extent() const { return n_ / 2 + 1; }

    struct RealBuffer {
        double* data = nullptr;
        ~RealBuffer();
        RealBuffer() = default;
        RealBuffer(RealBuffer&& o) noexcept : data(o.data) { o.data = nullptr; }
        RealBuffer(const RealBuffer&) = delete;
    };
    struct ComplexBuffer {
        std::complex<double>* data = nullptr;
        ~ComplexBuffer();
        ComplexBuffer() = default;
        ComplexBuffer(ComplexBuffer&& o) noexcept : data(o.data) { o.data = nullptr; }
        ComplexBuffer(const ComplexBuffer&) = delete;
    };
    RealBuffer alloc_real() const;
    ComplexBuffer alloc_complex() const;

    void forward(double* in, std::complex<double>* out) const;
    /// Unnormalized inverse; destroys `in`.
    void backward(std::complex<double>* in, double* out) const;

  private:
    int dim_;
    int n_;
    std::size_t real_size_;
    std::size_t complex_size_;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

/// Signed frequency of FFT index i on an n-point axis.
inline int signed_frequency(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace bgk
