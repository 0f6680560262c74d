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

// Greedy matching-pursuit encoder. Each 696-sample segment is loaded into a
// zero-padded 2048-sample buffer, correlated circularly against every
// kernel, and the best-matching scaled, shifted kernel is subtracted until
// the per-segment code budget is spent or the feedback threshold stops it.

#ifndef SPIKETRUM_MP_ENCODER_HPP_
#define SPIKETRUM_MP_ENCODER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spiketrum/fixed_point.hpp"
#include "spiketrum/kernel_bank.hpp"

namespace spiketrum {

struct SegmentBuffer {
  // transform_size() samples; the segment occupies [0, valid_samples).
  std::vector<double> data;
  std::size_t segment_index = 0;
  std::size_t valid_samples = 0;

  double energy() const;
};

// One matching-pursuit selection: kernel m, signed lag tau and signed
// intensity s.
struct Code {
  std::size_t m = 0;
  std::int32_t tau = 0;
  double s = 0.0;
  std::size_t segment_index = 0;
  std::size_t iteration = 0;

  friend bool operator==(const Code&, const Code&) = default;
};

enum class CorrelationPath { kDirect, kFft };

struct EncoderConfig {
  // Spikes per segment (sps): the cap on iterations per segment.
  std::size_t max_codes_per_segment = 16;
  // Stop a segment once the best |s| drops below this; 0 disables.
  double feedback_threshold = 0.0;
  CorrelationPath path = CorrelationPath::kFft;
  // Set for the 34-bit hardware emulation mode (direct path only).
  std::optional<QFormat> fixed;
  // Worker cap for encoding segments in parallel; 0 uses the hardware count.
  unsigned threads = 0;

  void validate(const KernelBank& bank) const;
};

// Splits `samples` into ceil(len / S) zero-padded buffers of
// bank.transform_size() samples.
std::vector<SegmentBuffer> segment_stream(std::span<const double> samples,
                                          const KernelBank& bank);
std::vector<SegmentBuffer> segment_stream(std::span<const double> samples,
                                          std::size_t segment_size,
                                          std::size_t transform_size);

// r[u] = sum_{t<L} data[(u + t) mod N] * kernel[t], u in [0, N).
std::vector<double> correlate_direct(const SegmentBuffer& buffer,
                                     const Kernel& kernel);
// Same contract, computed as IFFT(FFT(data) * conj(kernel spectrum)).
std::vector<double> correlate_fft(const SegmentBuffer& buffer,
                                  const Kernel& kernel);

// Row-major kernel_count x transform_size correlations of one buffer.
class CorrelationMatrix {
 public:
  CorrelationMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t m) {
    return {values_.data() + m * cols_, cols_};
  }
  std::span<const double> row(std::size_t m) const {
    return {values_.data() + m * cols_, cols_};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

// Correlates one buffer against every kernel in the bank.
CorrelationMatrix correlate_all(const SegmentBuffer& buffer,
                                const KernelBank& bank, CorrelationPath path);

// Circular lag u in [0, N) to signed tau in [-N/2, N/2).
std::int32_t lag_to_tau(std::size_t lag, std::size_t transform_size);
std::size_t tau_to_lag(std::int32_t tau, std::size_t transform_size);

// argmax over (m, u) of |r_m[u]|, ties to the smallest m then smallest u.
Code find_best_code(const CorrelationMatrix& correlations,
                    std::size_t segment_index, std::size_t iteration);

// data[(u + t) mod N] -= s * kernel[t] with u = tau mod N. Throws
// ParameterError when |tau| > N / 2.
void subtract_component(SegmentBuffer& buffer, const Kernel& kernel,
                        std::int32_t tau, double s);

inline bool feedback_should_stop(const Code& code, double threshold) {
  return code.s < 0 ? -code.s < threshold : code.s < threshold;
}

// Runs the matching-pursuit loop on one buffer. On return `buffer` holds the
// final residual. Codes that fail the feedback check are discarded.
std::vector<Code> encode_segment(SegmentBuffer& buffer, const KernelBank& bank,
                                 const EncoderConfig& config);

struct StreamEncoding {
  std::vector<Code> codes;
  std::size_t segment_count = 0;
  std::size_t sample_count = 0;
  // Final residual energy of each segment's buffer.
  std::vector<double> residual_energies;

  double total_residual_energy() const;
};

// Encodes every segment of `samples`; segments may run in parallel but the
// result is independent of scheduling.
StreamEncoding encode_stream(std::span<const double> samples,
                             const KernelBank& bank,
                             const EncoderConfig& config);

}  // namespace spiketrum

#endif  // SPIKETRUM_MP_ENCODER_HPP_
