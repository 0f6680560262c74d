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

#include "spiketrum/itp_coder.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "binary_io.hpp"
#include "spiketrum/errors.hpp"

namespace spiketrum {

void ChannelMap::validate() const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || (i > 0 && !(levels[i] > levels[i - 1]))) {
      throw ParameterError("channel levels must be positive and increasing");
    }
  }
  if (total_channels() > 0xFFFF) {
    throw ParameterError("too many output channels for 16-bit addresses");
  }
}

std::size_t channel_of(std::size_t m, std::size_t level,
                       const ChannelMap& map) {
  if (m >= map.kernel_count || level >= kLevelsPerKernel) {
    throw ParameterError("channel_of(" + std::to_string(m) + ", " +
                         std::to_string(level) + ") out of range");
  }
  return m * kLevelsPerKernel + level;
}

std::size_t quantize_intensity(double s, const ChannelMap& map) {
  const double a = std::abs(s);
  // Subtractors.
  const double d0 = std::abs(a - map.levels[0]);
  const double d1 = std::abs(a - map.levels[1]);
  const double d2 = std::abs(a - map.levels[2]);
  // Comparators.
  std::size_t level = d1 < d0 ? 1 : 0;
  const double nearest = level == 1 ? d1 : d0;
  if (d2 < nearest) level = 2;
  return level;
}

std::vector<SpikeEvent> codes_to_spikes(std::span<const Code> codes,
                                        const ChannelMap& map,
                                        std::size_t segment_size) {
  if (segment_size == 0) throw ParameterError("segment size must be >= 1");
  std::vector<SpikeEvent> spikes;
  spikes.reserve(codes.size());
  const auto last = static_cast<std::int64_t>(segment_size - 1);
  for (const Code& c : codes) {
    const std::int64_t delay =
        std::clamp<std::int64_t>(c.tau, 0, last);
    SpikeEvent e;
    e.time = static_cast<std::uint64_t>(c.segment_index) * segment_size +
             static_cast<std::uint64_t>(delay);
    e.channel = static_cast<std::uint16_t>(
        channel_of(c.m, quantize_intensity(c.s, map), map));
    spikes.push_back(e);
  }
  std::sort(spikes.begin(), spikes.end());
  return spikes;
}

std::vector<Code> spikes_to_codes(std::span<const SpikeEvent> spikes,
                                  const ChannelMap& map,
                                  std::size_t segment_size) {
  if (segment_size == 0) throw ParameterError("segment size must be >= 1");
  std::vector<Code> codes;
  codes.reserve(spikes.size());
  std::map<std::size_t, std::size_t> per_segment;
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    const SpikeEvent& e = spikes[i];
    if (e.channel >= map.total_channels()) {
      throw FormatError("spike channel " + std::to_string(e.channel) +
                            " outside [0, " +
                            std::to_string(map.total_channels()) + ")",
                        i);
    }
    Code c;
    c.m = e.channel / kLevelsPerKernel;
    c.s = map.levels[e.channel % kLevelsPerKernel];
    c.segment_index = static_cast<std::size_t>(e.time / segment_size);
    c.tau = static_cast<std::int32_t>(e.time % segment_size);
    c.iteration = per_segment[c.segment_index]++;
    codes.push_back(c);
  }
  return codes;
}

void write_aer_text(std::ostream& out, std::span<const SpikeEvent> spikes) {
  for (const SpikeEvent& e : spikes) out << e.time << ',' << e.channel << '\n';
}

std::vector<SpikeEvent> read_aer_text(std::istream& in,
                                      std::uint32_t channel_count) {
  std::vector<SpikeEvent> spikes;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_at = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("expected \"time,channel\"", line_at);
    }
    std::uint64_t time = 0;
    std::uint32_t channel = 0;
    const char* begin = line.data();
    const char* mid = begin + comma;
    const char* end = begin + line.size();
    auto t = std::from_chars(begin, mid, time);
    auto c = std::from_chars(mid + 1, end, channel);
    if (t.ec != std::errc() || t.ptr != mid || c.ec != std::errc() ||
        c.ptr != end) {
      throw FormatError("malformed AER record \"" + line + "\"", line_at);
    }
    if (channel >= channel_count) {
      throw FormatError("channel " + std::to_string(channel) +
                            " outside [0, " + std::to_string(channel_count) +
                            ")",
                        line_at);
    }
    if (!spikes.empty() && time < spikes.back().time) {
      throw FormatError("AER events not sorted by time", line_at);
    }
    spikes.push_back({time, static_cast<std::uint16_t>(channel)});
  }
  return spikes;
}

std::vector<char> encode_aer_binary(const SpikeTrain& train) {
  detail::ByteWriter w;
  w.put_magic("SPKA");
  w.put<std::uint32_t>(kAerFileVersion);
  w.put<std::uint32_t>(train.channel_count);
  w.put<double>(train.sample_rate);
  for (const SpikeEvent& e : train.spikes) {
    w.put<std::uint64_t>(e.time);
    w.put<std::uint16_t>(e.channel);
  }
  return w.bytes();
}

SpikeTrain decode_aer_binary(std::vector<char> bytes) {
  detail::ByteReader r(std::move(bytes));
  r.expect_magic("SPKA");
  const std::uint64_t version_at = r.offset();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kAerFileVersion) {
    throw FormatError("unsupported AER version " + std::to_string(version),
                      version_at);
  }
  SpikeTrain train;
  const std::uint64_t count_at = r.offset();
  train.channel_count = r.get<std::uint32_t>("channel_count");
  if (train.channel_count == 0 || train.channel_count > 0x10000) {
    throw FormatError("invalid channel count", count_at);
  }
  const std::uint64_t rate_at = r.offset();
  train.sample_rate = r.get<double>("sample_rate");
  if (!(train.sample_rate > 0.0) || !std::isfinite(train.sample_rate)) {
    throw FormatError("invalid sample rate", rate_at);
  }
  constexpr std::uint64_t kRecord = sizeof(std::uint64_t) + sizeof(std::uint16_t);
  if (r.remaining() % kRecord != 0) {
    throw FormatError("truncated AER record",
                      r.offset() + r.remaining() / kRecord * kRecord);
  }
  train.spikes.reserve(r.remaining() / kRecord);
  while (r.remaining() > 0) {
    const std::uint64_t at = r.offset();
    SpikeEvent e;
    e.time = r.get<std::uint64_t>("time");
    e.channel = r.get<std::uint16_t>("channel");
    if (e.channel >= train.channel_count) {
      throw FormatError("channel " + std::to_string(e.channel) +
                            " outside [0, " +
                            std::to_string(train.channel_count) + ")",
                        at);
    }
    if (!train.spikes.empty() && e.time < train.spikes.back().time) {
      throw FormatError("AER events not sorted by time", at);
    }
    train.spikes.push_back(e);
  }
  return train;
}

void save_aer(const std::string& path, const SpikeTrain& train,
              AerFormat format) {
  if (format == AerFormat::kBinary) {
    detail::write_file_bytes(path, encode_aer_binary(train));
    return;
  }
  std::ostringstream text;
  write_aer_text(text, train.spikes);
  const std::string s = text.str();
  detail::write_file_bytes(path, std::vector<char>(s.begin(), s.end()));
}

SpikeTrain load_aer(const std::string& path, std::uint32_t text_channel_count,
                    double text_sample_rate) {
  std::vector<char> bytes = detail::read_file_bytes(path);
  if (bytes.size() >= 4 && std::string(bytes.data(), 4) == "SPKA") {
    return decode_aer_binary(std::move(bytes));
  }
  // Anything that is not a binary file must parse as text; a stray binary
  // header surfaces as a bad-magic error rather than a parse error.
  if (!bytes.empty() && !std::isdigit(static_cast<unsigned char>(bytes[0])) &&
      bytes[0] != '\n' && bytes[0] != '\r') {
    throw FormatError("bad magic, expected \"SPKA\" or text AER", 0);
  }
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  SpikeTrain train;
  train.channel_count = text_channel_count;
  train.sample_rate = text_sample_rate;
  train.spikes = read_aer_text(in, text_channel_count);
  return train;
}

void write_codes_csv(std::ostream& out, std::span<const Code> codes) {
  out << "segment,iteration,kernel,tau,intensity\n";
  char intensity[64];
  for (const Code& c : codes) {
    std::snprintf(intensity, sizeof(intensity), "%.9g", c.s);
    out << c.segment_index << ',' << c.iteration << ',' << c.m << ','
        << c.tau << ',' << intensity << '\n';
  }
}

}  // namespace spiketrum
