// Copyright 2026 The Spiketrum Authors
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

#ifndef SPIKETRUM_FFT_HPP_
#define SPIKETRUM_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>

namespace spiketrum {

// Real-input discrete Fourier transform of a fixed power-of-two size, backed
// by FFTW. Plans are shared process-wide; transforms may run concurrently
// from any number of threads.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const { return size_; }
  // Number of non-redundant complex bins, size / 2 + 1.
  std::size_t bins() const { return size_ / 2 + 1; }

  // out[k] = sum_t in[t] * exp(-2 pi i k t / size), k in [0, bins()).
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;

  // Normalized inverse: forward() followed by inverse() is the identity.
  void inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  std::size_t size_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace spiketrum

#endif  // SPIKETRUM_FFT_HPP_
