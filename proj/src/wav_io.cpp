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

#include "spiketrum/wav_io.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "spiketrum/errors.hpp"

namespace spiketrum {

WavData read_wav(const std::string& path,
                 std::optional<std::uint32_t> expected_rate) {
  detail::ByteReader r(detail::read_file_bytes(path));
  r.expect_magic("RIFF");
  r.get<std::uint32_t>("RIFF size");
  r.expect_magic("WAVE");

  bool have_format = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  WavData wav;
  while (r.remaining() > 0) {
    const std::uint64_t chunk_at = r.offset();
    char id[4];
    for (char& c : id) c = r.get<char>("chunk id");
    const auto size = r.get<std::uint32_t>("chunk size");
    const std::string name(id, 4);
    if (name == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk too short", chunk_at);
      const auto audio_format = r.get<std::uint16_t>("audio format");
      channels = r.get<std::uint16_t>("channels");
      wav.sample_rate = r.get<std::uint32_t>("sample rate");
      r.get<std::uint32_t>("byte rate");
      r.get<std::uint16_t>("block align");
      bits = r.get<std::uint16_t>("bits per sample");
      for (std::uint32_t i = 16; i < size; ++i) r.get<char>("fmt extension");
      if (audio_format != 1) {
        throw FormatError(path + ": non-PCM WAV (format tag " +
                              std::to_string(audio_format) + ")",
                          chunk_at);
      }
      if (channels != 1) {
        throw FormatError(path + ": mono required (file has " +
                              std::to_string(channels) + " channels)",
                          chunk_at);
      }
      if (bits != 16) {
        throw FormatError(path + ": 16-bit PCM required (file has " +
                              std::to_string(bits) + " bits)",
                          chunk_at);
      }
      have_format = true;
    } else if (name == "data") {
      if (!have_format) throw FormatError("data chunk before fmt", chunk_at);
      const std::uint32_t count = size / 2;
      wav.samples.resize(count);
      for (double& v : wav.samples) {
        v = static_cast<double>(r.get<std::int16_t>("sample")) / 32768.0;
      }
      if (size % 2 != 0) r.get<char>("pad");
      break;
    } else {
      for (std::uint32_t i = 0; i < size + (size & 1u); ++i) {
        r.get<char>("chunk body");
      }
    }
  }
  if (!have_format) throw FormatError(path + ": no fmt chunk", r.offset());
  if (expected_rate && wav.sample_rate != *expected_rate) {
    throw ParameterError(path + ": sample rate " +
                         std::to_string(wav.sample_rate) +
                         " Hz does not match the kernel bank rate " +
                         std::to_string(*expected_rate) +
                         " Hz (no resampling is performed)");
  }
  return wav;
}

void write_wav(const std::string& path, std::span<const double> samples,
               std::uint32_t sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  detail::ByteWriter w;
  w.put_magic("RIFF");
  w.put<std::uint32_t>(36 + data_bytes);
  w.put_magic("WAVE");
  w.put_magic("fmt ");
  w.put<std::uint32_t>(16);
  w.put<std::uint16_t>(1);
  w.put<std::uint16_t>(1);
  w.put<std::uint32_t>(sample_rate);
  w.put<std::uint32_t>(sample_rate * 2);
  w.put<std::uint16_t>(2);
  w.put<std::uint16_t>(16);
  w.put_magic("data");
  w.put<std::uint32_t>(data_bytes);
  for (double v : samples) {
    const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0);
    const double scaled = std::min(32767.0, std::round(clamped * 32768.0));
    w.put<std::int16_t>(static_cast<std::int16_t>(scaled));
  }
  detail::write_file_bytes(path, w.bytes());
}

}  // namespace spiketrum
