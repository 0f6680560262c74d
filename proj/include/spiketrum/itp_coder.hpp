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

// Intensity-to-place coding: every kernel owns three output channels, one
// per centre intensity, and each code becomes one spike on the channel whose
// intensity is nearest to |s|, delayed by the code's lag.

#ifndef SPIKETRUM_ITP_CODER_HPP_
#define SPIKETRUM_ITP_CODER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spiketrum/mp_encoder.hpp"

namespace spiketrum {

inline constexpr std::size_t kLevelsPerKernel = 3;

struct ChannelMap {
  std::array<double, kLevelsPerKernel> levels = {0.0065, 0.4115, 25.8744};
  std::size_t kernel_count = kDefaultKernelCount;

  std::size_t total_channels() const {
    return kernel_count * kLevelsPerKernel;
  }
  void validate() const;
};

struct SpikeEvent {
  std::uint64_t time = 0;  // absolute sample index
  std::uint16_t channel = 0;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
  friend auto operator<=>(const SpikeEvent&, const SpikeEvent&) = default;
};

// m * 3 + level. Throws ParameterError when either index is out of range.
std::size_t channel_of(std::size_t m, std::size_t level,
                       const ChannelMap& map = {});

// argmin_i ||s| - C_i| evaluated as three differences and two comparisons;
// ties go to the lower level.
std::size_t quantize_intensity(double s, const ChannelMap& map = {});

// One spike per code at segment_index * S + clamp(tau, 0, S - 1), sorted by
// (time, channel).
std::vector<SpikeEvent> codes_to_spikes(std::span<const Code> codes,
                                        const ChannelMap& map,
                                        std::size_t segment_size);

// Inverse mapping with the level value as intensity. Throws FormatError for
// channels outside the map.
std::vector<Code> spikes_to_codes(std::span<const SpikeEvent> spikes,
                                  const ChannelMap& map,
                                  std::size_t segment_size);

// Spike stream plus the metadata carried by the binary AER file.
struct SpikeTrain {
  std::vector<SpikeEvent> spikes;
  std::uint32_t channel_count =
      static_cast<std::uint32_t>(kDefaultKernelCount * kLevelsPerKernel);
  double sample_rate = kDefaultSampleRate;
};

inline constexpr std::uint32_t kAerFileVersion = 1;

// Text AER: one "time_sample,channel" line per event, sorted by time.
void write_aer_text(std::ostream& out, std::span<const SpikeEvent> spikes);
// Binary AER: "SPKA", u32 version, u32 channel_count, f64 sample_rate, then
// (u64 time, u16 channel) records, little-endian.
std::vector<char> encode_aer_binary(const SpikeTrain& train);

// Parsers throw FormatError with the byte offset of the offending record.
std::vector<SpikeEvent> read_aer_text(std::istream& in,
                                      std::uint32_t channel_count);
SpikeTrain decode_aer_binary(std::vector<char> bytes);

enum class AerFormat { kBinary, kText };

void save_aer(const std::string& path, const SpikeTrain& train,
              AerFormat format);
// Detects the format from the leading magic; text files take the given
// channel count and sample rate.
SpikeTrain load_aer(const std::string& path,
                    std::uint32_t text_channel_count =
                        kDefaultKernelCount * kLevelsPerKernel,
                    double text_sample_rate = kDefaultSampleRate);

// CSV "segment,iteration,kernel,tau,intensity" with 9 significant digits.
void write_codes_csv(std::ostream& out, std::span<const Code> codes);

}  // namespace spiketrum

#endif  // SPIKETRUM_ITP_CODER_HPP_
