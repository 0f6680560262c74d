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

#ifndef SPIKETRUM_WAV_IO_HPP_
#define SPIKETRUM_WAV_IO_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spiketrum {

struct WavData {
  std::vector<double> samples;  // in [-1, 1)
  std::uint32_t sample_rate = 0;
};

// Reads a RIFF/WAVE file holding 16-bit PCM mono audio, scaling samples by
// 1/32768. When `expected_rate` is set, any other rate is an error; there is
// no resampling.
WavData read_wav(const std::string& path,
                 std::optional<std::uint32_t> expected_rate = std::nullopt);

// Writes 16-bit PCM mono; samples are clamped to [-1, 1] and scaled by
// 32768 (saturating at 32767).
void write_wav(const std::string& path, std::span<const double> samples,
               std::uint32_t sample_rate);

}  // namespace spiketrum

#endif  // SPIKETRUM_WAV_IO_HPP_
