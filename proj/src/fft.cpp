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

#include "spiketrum/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "spiketrum/errors.hpp"

namespace spiketrum {
namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW's planner is not thread-safe; execution with the new-array interface
// is. Plans live for the rest of the process.
PlanPair plans_for(std::size_t size) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;

  const int n = static_cast<int>(size);
  std::vector<double> real(size);
  std::vector<fftw_complex> spectrum(size / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair pair{
      fftw_plan_dft_r2c_1d(n, real.data(), spectrum.data(), flags),
      fftw_plan_dft_c2r_1d(n, spectrum.data(), real.data(), flags)};
  cache.emplace(size, pair);
  return pair;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw ParameterError("FFT size must be a power of two >= 2, got " +
                         std::to_string(size));
  }
  PlanPair pair = plans_for(size);
  forward_plan_ = pair.forward;
  inverse_plan_ = pair.inverse;
}

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != size_ || out.size() != bins()) {
    throw ParameterError("RealFft::forward: buffer size mismatch");
  }
  // Out-of-place r2c leaves its input untouched.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() != bins() || out.size() != size_) {
    throw ParameterError("RealFft::inverse: buffer size mismatch");
  }
  // c2r overwrites its input.
  thread_local std::vector<std::complex<double>> scratch;
  scratch.assign(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(size_);
  for (double& v : out) v *= scale;
}

}  // namespace spiketrum
