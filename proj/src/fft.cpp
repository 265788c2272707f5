// Copyright 2025 The Ambisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ambisteer/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace ambisteer {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

RealFft::RealFft(int size) : size_(size), impl_(new Impl) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  std::lock_guard<std::mutex> lock(plan_mutex());
  impl_->real = fftw_alloc_real(size);
  impl_->cplx = fftw_alloc_complex(size / 2 + 1);
  // FFTW_ESTIMATE picks the plan deterministically and does not touch the
  // buffers.
  impl_->fwd = fftw_plan_dft_r2c_1d(size, impl_->real, impl_->cplx, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(size, impl_->cplx, impl_->real, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) throw std::runtime_error("RealFft: plan failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
  if (impl_->real) fftw_free(impl_->real);
  if (impl_->cplx) fftw_free(impl_->cplx);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(impl_->real, in, sizeof(double) * size_);
  fftw_execute(impl_->fwd);
  std::memcpy(out, impl_->cplx, sizeof(fftw_complex) * bins());
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(impl_->cplx, in, sizeof(fftw_complex) * bins());
  fftw_execute(impl_->inv);
  const double scale = 1.0 / size_;
  for (int i = 0; i < size_; ++i) out[i] = impl_->real[i] * scale;
}

std::vector<double> fft_convolve(const std::vector<double>& x,
                                 const std::vector<double>& h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;
  std::size_t n = 2;
  while (n < out_len) n *= 2;

  RealFft fft(static_cast<int>(n));
  std::vector<double> xa(n, 0.0), ha(n, 0.0);
  std::copy(x.begin(), x.end(), xa.begin());
  std::copy(h.begin(), h.end(), ha.begin());
  std::vector<std::complex<double>> xs(fft.bins()), hs(fft.bins());
  fft.forward(xa.data(), xs.data());
  fft.forward(ha.data(), hs.data());
  for (int k = 0; k < fft.bins(); ++k) xs[k] *= hs[k];
  std::vector<double> y(n);
  fft.inverse(xs.data(), y.data());
  y.resize(out_len);
  return y;
}

}  // namespace ambisteer
