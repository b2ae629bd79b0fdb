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

#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "error.hpp"

namespace bgk {

namespace {
// the FFTW planner is not re-entrant
std::mutex planner_mutex;
}  // namespace

PeriodicFFT::PeriodicFFT(int dim, int n) : dim_(dim), n_(n) {
    require(dim >= 1 && dim <= 3, "FFT dimension must be 1..3");
    require(n >= 2 && n % 2 == 0, "FFT size must be even and >= 2");
    real_size_ = 1;
    for (int a = 0; a < dim; ++a) real_size_ *= static_cast<std::size_t>(n);
    complex_size_ = real_size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(last_extent());

    int dims[3] = {n, n, n};
    std::lock_guard lock(planner_mutex);
    double* r = fftw_alloc_real(real_size_);
    fftw_complex* c = fftw_alloc_complex(complex_size_);
    forward_plan_ = fftw_plan_dft_r2c(dim, dims, r, c, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_c2r(dim, dims, c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
    if (!forward_plan_ || !backward_plan_) fail(ErrorCode::Internal, "FFTW planning failed");
}

PeriodicFFT::~PeriodicFFT() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

PeriodicFFT::RealBuffer::~RealBuffer() { fftw_free(data); }
PeriodicFFT::ComplexBuffer::~ComplexBuffer() { fftw_free(data); }

PeriodicFFT::RealBuffer PeriodicFFT::alloc_real() const {
    RealBuffer b;
    b.data = fftw_alloc_real(real_size_);
    return b;
}

PeriodicFFT::ComplexBuffer PeriodicFFT::alloc_complex() const {
    ComplexBuffer b;
    b.data = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(complex_size_));
    return b;
}

void PeriodicFFT::forward(double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in, reinterpret_cast<fftw_complex*>(out));
}

void PeriodicFFT::backward(std::complex<double>* in, double* out) const {
    fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace bgk
