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

// Fixed-point execution mode of the encoder and the parity harness that
// compares it against the double-precision path.

#ifndef SPIKETRUM_FIXED_ENCODER_HPP_
#define SPIKETRUM_FIXED_ENCODER_HPP_

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spiketrum/fixed_point.hpp"
#include "spiketrum/kernel_bank.hpp"
#include "spiketrum/mp_encoder.hpp"

namespace spiketrum {

// Circular correlation of raw Q values: each lag accumulates the exact
// 2F-fraction-bit products in a wide integer and is rounded once (RNE) to
// F bits, then saturated. Reference implementation, O(N L).
std::vector<std::int64_t> correlate_fixed_direct(
    std::span<const std::int64_t> data_raw,
    std::span<const std::int64_t> kernel_raw, QFormat format,
    bool* saturated = nullptr);

struct FixedEncodeTrace {
  // Exact residual energy in raw units (2F fraction bits), before the first
  // iteration and after each accepted subtraction.
  std::vector<fixed::Wide> residual_energy_raw;
  bool energy_increased = false;
  bool saturated = false;
};

// Holds the bank quantized to one Q format. Correlation results are
// bit-identical to correlate_fixed_direct; they are obtained through
// limb-split double-precision transforms whose partial sums are small enough
// to round back to exact integers, with a direct fallback if any partial sum
// is not within 1/8 of an integer.
class FixedPointEncoder {
 public:
  FixedPointEncoder(const KernelBank& bank, QFormat format);

  QFormat format() const { return format_; }
  const std::vector<std::int64_t>& kernel_raw(std::size_t m) const {
    return kernels_[m].raw;
  }

  // kernel_count x N correlations, row-major.
  std::vector<std::int64_t> correlate(std::span<const std::int64_t> data_raw,
                                      bool* saturated = nullptr) const;

  // On return `buffer` holds the dequantized residual.
  std::vector<Code> encode(SegmentBuffer& buffer, const EncoderConfig& config,
                           FixedEncodeTrace* trace = nullptr) const;

  std::size_t fallback_count() const { return fallbacks_; }

 private:
  struct QuantizedKernel {
    std::vector<std::int64_t> raw;
    std::vector<std::complex<double>> high_spectrum;
    std::vector<std::complex<double>> low_spectrum;
  };

  QFormat format_;
  std::size_t transform_size_;
  int kernel_split_;
  std::vector<QuantizedKernel> kernels_;
  mutable std::atomic<std::size_t> fallbacks_{0};
};

std::vector<Code> encode_segment_fixed(SegmentBuffer& buffer,
                                       const KernelBank& bank,
                                       const EncoderConfig& config);

struct ParityMismatch {
  std::size_t segment_index = 0;
  std::size_t iteration = 0;
  std::optional<Code> float_code;
  std::optional<Code> fixed_code;
};

struct ParityReport {
  std::size_t compared = 0;
  std::size_t matched = 0;
  std::vector<ParityMismatch> mismatches;
  // Segments whose fixed-point residual energy rose in some iteration.
  std::vector<std::size_t> energy_increase_segments;
  bool saturated = false;

  double match_fraction() const {
    return compared == 0 ? 1.0
                         : static_cast<double>(matched) /
                               static_cast<double>(compared);
  }
};

// Encodes every segment with the double-precision FFT path and with the
// fixed-point path of config.fixed, comparing (m, tau) position by position.
ParityReport run_fixed_parity(std::span<const SegmentBuffer> segments,
                              const KernelBank& bank,
                              const EncoderConfig& config);

}  // namespace spiketrum

#endif  // SPIKETRUM_FIXED_ENCODER_HPP_
