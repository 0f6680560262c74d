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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spiketrum/errors.hpp"
#include "spiketrum/itp_coder.hpp"

namespace spiketrum {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("spiketrum_itp_" + name))
      .string();
}

Code make_code(std::size_t m, std::int32_t tau, double s, std::size_t segment) {
  Code c;
  c.m = m;
  c.tau = tau;
  c.s = s;
  c.segment_index = segment;
  return c;
}

TEST_CASE("channel_of") {
  CHECK(channel_of(0, 0) == 0);
  CHECK(channel_of(39, 2) == 119);
  CHECK(channel_of(7, 1) == 22);
  CHECK_THROWS_AS(channel_of(40, 0), ParameterError);
  CHECK_THROWS_AS(channel_of(0, 3), ParameterError);

  std::set<std::size_t> seen;
  for (std::size_t m = 0; m < 40; ++m) {
    for (std::size_t l = 0; l < 3; ++l) seen.insert(channel_of(m, l));
  }
  CHECK(seen.size() == 120);
  CHECK(*seen.rbegin() == 119);
}

TEST_CASE("channel map defaults") {
  const ChannelMap map;
  CHECK(map.levels[0] == 0.0065);
  CHECK(map.levels[1] == 0.4115);
  CHECK(map.levels[2] == 25.8744);
  CHECK(map.total_channels() == 120);
  CHECK_NOTHROW(map.validate());
  ChannelMap bad;
  bad.levels = {0.5, 0.4, 1.0};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("quantize_intensity") {
  CHECK(quantize_intensity(0.0065) == 0);
  // Arithmetic midpoint of the first two levels ties to the lower level.
  CHECK(quantize_intensity((0.0065 + 0.4115) / 2.0) == 0);
  CHECK(quantize_intensity(0.2090) == 0);
  CHECK(quantize_intensity(0.21) == 1);
  CHECK(quantize_intensity(30.0) == 2);
  CHECK(quantize_intensity(-30.0) == 2);
  CHECK(quantize_intensity(-0.4) == 1);
  CHECK(quantize_intensity(0.0) == 0);
}

TEST_CASE("quantize_intensity agrees with a brute-force scan") {
  const ChannelMap map;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> log_mag(-4.0, 2.0);
  std::bernoulli_distribution negative(0.5);
  for (int i = 0; i < 10000; ++i) {
    double s = std::pow(10.0, log_mag(rng));
    if (negative(rng)) s = -s;
    REQUIRE(quantize_intensity(s, map) == oracle::brute_force_level(s, map.levels));
  }
}

TEST_CASE("codes_to_spikes placement and ordering") {
  const ChannelMap map;
  const std::vector<Code> one = {make_code(7, 100, 0.4, 3)};
  const auto spikes = codes_to_spikes(one, map, 696);
  REQUIRE(spikes.size() == 1);
  CHECK(spikes[0].time == 2188);
  CHECK(spikes[0].channel == 22);

  const std::vector<Code> clamped = {make_code(2, -50, 1.0, 4),
                                     make_code(2, 900, 1.0, 4)};
  const auto c = codes_to_spikes(clamped, map, 696);
  CHECK(c[0].time == 4 * 696);
  CHECK(c[1].time == 4 * 696 + 695);

  CHECK(codes_to_spikes(std::vector<Code>{}, map, 696).empty());

  std::vector<Code> many;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> m(0, 39), tau(-1024, 1023), seg(0, 9);
  std::uniform_real_distribution<double> s(-30.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    many.push_back(make_code(m(rng), tau(rng), s(rng), seg(rng)));
  }
  const auto sorted = codes_to_spikes(many, map, 696);
  CHECK(sorted.size() == many.size());
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
  std::shuffle(many.begin(), many.end(), rng);
  CHECK(codes_to_spikes(many, map, 696) == sorted);
}

TEST_CASE("spikes_to_codes inverts the placement") {
  const ChannelMap map;
  const std::vector<SpikeEvent> spike = {{2188, 22}};
  const auto codes = spikes_to_codes(spike, map, 696);
  REQUIRE(codes.size() == 1);
  CHECK(codes[0].m == 7);
  CHECK(codes[0].tau == 100);
  CHECK(codes[0].s == 0.4115);
  CHECK(codes[0].segment_index == 3);

  const std::vector<SpikeEvent> bad = {{10, 120}};
  CHECK_THROWS_AS(spikes_to_codes(bad, map, 696), FormatError);
}

TEST_CASE("codes -> spikes -> codes on the clamp-free domain") {
  const ChannelMap map;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> m(0, 39), tau(0, 695), seg(0, 50);
  std::uniform_real_distribution<double> s(-30.0, 30.0);
  for (int i = 0; i < 500; ++i) {
    const Code in = make_code(m(rng), tau(rng), s(rng), seg(rng));
    const auto spikes = codes_to_spikes(std::vector<Code>{in}, map, 696);
    const auto out = spikes_to_codes(spikes, map, 696);
    REQUIRE(out.size() == 1);
    CHECK(out[0].m == in.m);
    CHECK(out[0].tau == in.tau);
    CHECK(out[0].segment_index == in.segment_index);
    CHECK(out[0].s == map.levels[quantize_intensity(in.s, map)]);
  }
}

TEST_CASE("AER text and binary round trips") {
  SpikeTrain train;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::uint64_t> gap(0, 50);
  std::uniform_int_distribution<int> ch(0, 119);
  std::uint64_t t = 0;
  for (int i = 0; i < 300; ++i) {
    t += gap(rng);
    train.spikes.push_back({t, static_cast<std::uint16_t>(ch(rng))});
  }

  std::ostringstream text;
  write_aer_text(text, train.spikes);
  std::istringstream in(text.str());
  CHECK(read_aer_text(in, 120) == train.spikes);

  const SpikeTrain back = decode_aer_binary(encode_aer_binary(train));
  CHECK(back.spikes == train.spikes);
  CHECK(back.channel_count == 120);
  CHECK(back.sample_rate == 16000.0);

  const std::string bin = temp_path("rt.aer");
  const std::string txt = temp_path("rt.txt");
  save_aer(bin, train, AerFormat::kBinary);
  save_aer(txt, train, AerFormat::kText);
  CHECK(load_aer(bin).spikes == train.spikes);
  CHECK(load_aer(txt).spikes == train.spikes);
  CHECK(std::filesystem::file_size(bin) == 4 + 4 + 4 + 8 + 300 * 10);
  std::filesystem::remove(bin);
  std::filesystem::remove(txt);
}

TEST_CASE("AER text format details") {
  std::ostringstream out;
  const std::vector<SpikeEvent> spikes = {{0, 5}, {2188, 22}};
  write_aer_text(out, spikes);
  CHECK(out.str() == "0,5\n2188,22\n");
}

TEST_CASE("AER parsers reject malformed input") {
  SUBCASE("text: bad channel") {
    std::istringstream in("1,2\n5,120\n");
    try {
      read_aer_text(in, 120);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 4);
    }
  }
  SUBCASE("text: garbage") {
    std::istringstream in("1,2\nabc\n");
    CHECK_THROWS_AS(read_aer_text(in, 120), FormatError);
  }
  SUBCASE("text: unsorted") {
    std::istringstream in("9,2\n5,1\n");
    CHECK_THROWS_AS(read_aer_text(in, 120), FormatError);
  }
  SUBCASE("binary: bad magic") {
    std::vector<char> bytes = encode_aer_binary(SpikeTrain{});
    bytes[1] = 'Q';
    try {
      decode_aer_binary(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("bad magic") != std::string::npos);
    }
  }
  SUBCASE("binary: truncated record") {
    SpikeTrain train;
    train.spikes = {{1, 1}, {2, 2}};
    std::vector<char> bytes = encode_aer_binary(train);
    bytes.pop_back();
    try {
      decode_aer_binary(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 20 + 10);
    }
  }
  SUBCASE("binary: channel out of range") {
    SpikeTrain train;
    train.spikes = {{1, 119}, {2, 120}};
    try {
      decode_aer_binary(encode_aer_binary(train));
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 30);
    }
  }
}

TEST_CASE("code CSV") {
  std::ostringstream out;
  Code c = make_code(7, -12, 0.123456789123, 3);
  c.iteration = 2;
  write_codes_csv(out, std::vector<Code>{c});
  CHECK(out.str() ==
        "segment,iteration,kernel,tau,intensity\n3,2,7,-12,0.123456789\n");
}

}  // namespace
}  // namespace spiketrum

namespace spiketrum {
namespace {

TEST_CASE("constant-amplitude tone lands on one channel per kernel") {
  const KernelBank& bank = oracle::default_bank();
  const double fc = bank[20].center_freq;
  std::vector<double> x(16000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.5 * std::sin(2.0 * std::numbers::pi * fc * static_cast<double>(i) / 16000.0);
  }
  EncoderConfig config;
  config.max_codes_per_segment = 1;
  const StreamEncoding e = encode_stream(x, bank, config);
  const auto spikes = codes_to_spikes(e.codes, ChannelMap{}, bank.segment_size());
  std::map<std::size_t, std::set<std::uint16_t>> channels_by_kernel;
  for (const SpikeEvent& s : spikes) {
    channels_by_kernel[s.channel / 3].insert(s.channel);
  }
  CHECK(spikes.size() == e.segment_count);
  for (const auto& [kernel, channels] : channels_by_kernel) {
    CHECK_MESSAGE(channels.size() == 1, "kernel " << kernel);
  }
}

}  // namespace
}  // namespace spiketrum
