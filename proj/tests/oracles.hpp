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

// Test-only reference implementations. Each one is written independently of
// the library code it checks.

#ifndef SPIKETRUM_TESTS_ORACLES_HPP_
#define SPIKETRUM_TESTS_ORACLES_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spiketrum/kernel_bank.hpp"
#include "spiketrum/mp_encoder.hpp"

namespace spiketrum::oracle {

// The default bank is expensive enough to share between test cases.
inline const KernelBank& default_bank() {
  static const KernelBank bank = build_bank();
  return bank;
}

// r[u] = sum_t x[(u + t) mod n] * k[t], evaluated literally.
inline std::vector<double> circular_correlation(const std::vector<double>& x,
                                                const std::vector<double>& k) {
  const std::size_t n = x.size();
  std::vector<double> r(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    long double acc = 0.0L;
    for (std::size_t t = 0; t < k.size(); ++t) {
      acc += static_cast<long double>(x[(u + t) % n]) * k[t];
    }
    r[u] = static_cast<double>(acc);
  }
  return r;
}

// Naive DFT bin k of a zero-padded real sequence of transform length n.
inline std::complex<double> dft_bin(const std::vector<double>& x,
                                    std::size_t n, std::size_t k) {
  std::complex<long double> acc = 0.0L;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const long double angle = -2.0L * std::numbers::pi_v<long double> *
                              static_cast<long double>((k * t) % n) / n;
    acc += static_cast<long double>(x[t]) *
           std::complex<long double>(std::cos(angle), std::sin(angle));
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

struct BruteBest {
  std::size_t m = 0;
  std::size_t lag = 0;
  double value = 0.0;
};

// Exhaustive scan for max |r| over every kernel and every lag of a buffer,
// first occurrence winning.
inline BruteBest brute_force_best(const std::vector<double>& x,
                                  const KernelBank& bank) {
  BruteBest best;
  double best_abs = -1.0;
  for (std::size_t m = 0; m < bank.size(); ++m) {
    const std::vector<double> r = circular_correlation(x, bank[m].samples);
    for (std::size_t u = 0; u < r.size(); ++u) {
      if (std::fabs(r[u]) > best_abs) {
        best_abs = std::fabs(r[u]);
        best = {m, u, r[u]};
      }
    }
  }
  return best;
}

inline std::size_t brute_force_level(double s,
                                     const std::array<double, 3>& levels) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (std::fabs(std::fabs(s) - levels[i]) <
        std::fabs(std::fabs(s) - levels[best])) {
      best = i;
    }
  }
  return best;
}

// Buffer of length n holding s * kernel starting at `slot` (no wrap).
inline SegmentBuffer placed_kernel(const Kernel& k, double s, std::size_t slot,
                                   std::size_t n = 2048) {
  SegmentBuffer b;
  b.data.assign(n, 0.0);
  b.valid_samples = 696;
  for (std::size_t t = 0; t < k.samples.size(); ++t) {
    b.data[(slot + t) % n] += s * k.samples[t];
  }
  return b;
}

// Segment of `valid` uniform samples in [-amp, amp), zero-padded to n.
inline SegmentBuffer random_segment(std::mt19937_64& rng, double amp = 1.0,
                                    std::size_t valid = 696,
                                    std::size_t n = 2048) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  SegmentBuffer b;
  b.data.assign(n, 0.0);
  b.valid_samples = valid;
  for (std::size_t i = 0; i < valid; ++i) b.data[i] = dist(rng);
  return b;
}

inline double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Round-to-nearest-even of p / 2^f, saturated to 34 bits, in arbitrary
// precision.
inline std::int64_t wide_round_saturate(boost::multiprecision::cpp_int p,
                                        int f) {
  using boost::multiprecision::cpp_int;
  const cpp_int divisor = cpp_int(1) << f;
  cpp_int q = p / divisor;  // truncates toward zero
  cpp_int rem = p - q * divisor;
  if (rem < 0) {
    q -= 1;
    rem += divisor;
  }
  const cpp_int twice = rem * 2;
  if (twice > divisor || (twice == divisor && (q & 1) != 0)) q += 1;
  const cpp_int hi = (cpp_int(1) << 33) - 1;
  const cpp_int lo = -(cpp_int(1) << 33);
  if (q > hi) q = hi;
  if (q < lo) q = lo;
  return q.convert_to<std::int64_t>();
}

}  // namespace spiketrum::oracle

#endif  // SPIKETRUM_TESTS_ORACLES_HPP_
