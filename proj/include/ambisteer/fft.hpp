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

#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace ambisteer {

/// Real-to-complex FFT of a fixed size (FFTW backend). Instances are cheap
/// and not thread-safe; create one per thread. Plan creation is internally
/// serialized.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int bins() const { return size_ / 2 + 1; }

  /// Unnormalized forward transform; `out` receives bins() values.
  void forward(const double* in, std::complex<double>* out);

  /// Inverse transform scaled by 1/size, so inverse(forward(x)) == x.
  void inverse(const std::complex<double>* in, double* out);

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

/// y = x (*) h, linear convolution via FFT. Output length x.size()+h.size()-1.
std::vector<double> fft_convolve(const std::vector<double>& x,
                                 const std::vector<double>& h);

}  // namespace ambisteer
