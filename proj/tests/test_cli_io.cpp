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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "spiketrum/commands.hpp"
#include "spiketrum/decoder_metrics.hpp"
#include "spiketrum/errors.hpp"
#include "spiketrum/itp_coder.hpp"
#include "spiketrum/wav_io.hpp"

namespace spiketrum {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("spiketrum_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
void put(std::string& s, T v) {
  s.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

// Minimal RIFF writer for headers the library refuses to produce.
void write_raw_wav(const std::string& path, std::uint16_t format,
                   std::uint16_t channels, std::uint32_t rate,
                   std::uint16_t bits, std::size_t frames) {
  const std::uint32_t block = channels * bits / 8;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * block);
  std::string s = "RIFF";
  put<std::uint32_t>(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put<std::uint32_t>(s, 16);
  put<std::uint16_t>(s, format);
  put<std::uint16_t>(s, channels);
  put<std::uint32_t>(s, rate);
  put<std::uint32_t>(s, rate * block);
  put<std::uint16_t>(s, static_cast<std::uint16_t>(block));
  put<std::uint16_t>(s, bits);
  s += "data";
  put<std::uint32_t>(s, data_bytes);
  s.append(data_bytes, '\0');
  std::ofstream(path, std::ios::binary) << s;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<double> noise(std::size_t n, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

TEST_CASE("WAV write and read") {
  TempDir dir;
  const std::string path = dir.file("a.wav");

  SUBCASE("silence") {
    write_wav(path, std::vector<double>(100, 0.0), 16000);
    const WavData w = read_wav(path, 16000u);
    CHECK(w.sample_rate == 16000);
    CHECK(w.samples == std::vector<double>(100, 0.0));
  }
  SUBCASE("clamping") {
    write_wav(path, std::vector<double>{1.5, -1.5, 1.0, -1.0}, 16000);
    const WavData w = read_wav(path);
    CHECK(w.samples[0] == 32767.0 / 32768.0);
    CHECK(w.samples[1] == -1.0);
    CHECK(w.samples[2] == 32767.0 / 32768.0);
    CHECK(w.samples[3] == -1.0);
  }
  SUBCASE("round trip error is within one LSB") {
    const auto x = noise(5000, 0.99, 1);
    write_wav(path, x, 16000);
    const WavData w = read_wav(path);
    REQUIRE(w.samples.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      REQUIRE(std::abs(w.samples[i] - x[i]) <= 1.0 / 32768.0);
    }
  }
  SUBCASE("stereo is rejected") {
    write_raw_wav(path, 1, 2, 16000, 16, 10);
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("mono required"),
                         FormatError);
  }
  SUBCASE("non-PCM is rejected") {
    write_raw_wav(path, 3, 1, 16000, 32, 10);
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("non-PCM"), FormatError);
  }
  SUBCASE("8-bit is rejected") {
    write_raw_wav(path, 1, 1, 16000, 8, 10);
    CHECK_THROWS_WITH_AS(read_wav(path), doctest::Contains("16-bit"), FormatError);
  }
  SUBCASE("sample rate mismatch names both rates") {
    write_raw_wav(path, 1, 1, 44100, 16, 10);
    CHECK_THROWS_WITH_AS(read_wav(path, 16000u),
                         doctest::Contains("44100 Hz does not match the kernel bank rate 16000 Hz"),
                         ParameterError);
  }
  SUBCASE("not a RIFF file") {
    std::ofstream(path, std::ios::binary) << "hello world, not audio";
    CHECK_THROWS_AS(read_wav(path), FormatError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_wav(dir.file("missing.wav")), IoError);
  }
}

TEST_CASE("cli encode then decode") {
  TempDir dir;
  const std::string wav = dir.file("in.wav");
  const auto x = noise(696 * 4, 0.3, 2);
  write_wav(wav, x, 16000);

  const CliResult enc = cli({"encode", wav, "-o", dir.file("s.aer"), "--codes",
                             dir.file("c.csv"), "--report", dir.file("r.json")});
  REQUIRE_MESSAGE(enc.code == 0, enc.err);
  CHECK(enc.out.find("spikes: 64\n") != std::string::npos);
  CHECK(slurp(dir.file("c.csv")).rfind("segment,iteration,kernel,tau,intensity\n", 0) == 0);
  const auto report = nlohmann::json::parse(slurp(dir.file("r.json")));
  CHECK(report.size() == 8);
  CHECK(report["spike_count"] == 64);

  const SpikeTrain train = load_aer(dir.file("s.aer"), 120, 16000.0);
  CHECK(train.spikes.size() == 64);

  const CliResult dec = cli({"decode", dir.file("s.aer"), "-o", dir.file("out.wav"),
                             "--reference", wav});
  REQUIRE_MESSAGE(dec.code == 0, dec.err);
  CHECK(dec.out.find("snr_db: ") != std::string::npos);
  const WavData out = read_wav(dir.file("out.wav"), 16000u);
  CHECK(out.samples.size() == x.size());

  SUBCASE("text AER decodes the same") {
    const CliResult t = cli({"encode", wav, "-o", dir.file("s.txt"), "--aer-format", "text"});
    REQUIRE(t.code == 0);
    CHECK(load_aer(dir.file("s.txt"), 120, 16000.0).spikes == train.spikes);
  }
}

TEST_CASE("cli decode edge cases") {
  TempDir dir;
  SUBCASE("empty spike train gives silence of the requested length") {
    SpikeTrain empty;
    save_aer(dir.file("e.aer"), empty, AerFormat::kBinary);
    const CliResult r = cli({"decode", dir.file("e.aer"), "-o", dir.file("o.wav"),
                             "--length", "1000"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const WavData w = read_wav(dir.file("o.wav"));
    CHECK(w.samples == std::vector<double>(1000, 0.0));
  }
  SUBCASE("wrong magic") {
    std::ofstream(dir.file("bad.aer"), std::ios::binary) << "XXXXXXXXXXXXXXXXXXXXXXXX";
    const CliResult r = cli({"decode", dir.file("bad.aer"), "-o", dir.file("o.wav")});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(r.err.find("bad magic") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.file("o.wav")));
  }
}

TEST_CASE("cli kernels writes a loadable bank") {
  TempDir dir;
  const CliResult r = cli({"kernels", "-o", dir.file("b.bank"), "--csv", dir.file("k.csv")});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(load_bank(dir.file("b.bank")) == oracle::default_bank());
  const std::string csv = slurp(dir.file("k.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1354);

  const std::string wav = dir.file("in.wav");
  write_wav(wav, noise(696 * 2, 0.3, 3), 16000);
  const CliResult a = cli({"encode", wav, "-o", dir.file("a.aer")});
  const CliResult b = cli({"encode", wav, "-o", dir.file("b.aer"), "--bank", dir.file("b.bank")});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(dir.file("a.aer")) == slurp(dir.file("b.aer")));
}

TEST_CASE("cli sweep") {
  TempDir dir;
  const CliResult r = cli({"sweep", "-o", dir.file("s.aer"), "--raster", dir.file("r.csv")});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("segments: 115\n") != std::string::npos);
  CHECK(r.out.find("spikes: 115\n") != std::string::npos);
  const std::string csv = slurp(dir.file("r.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 116);

  EncoderConfig one_code;
  one_code.max_codes_per_segment = 1;

  const SweepResult sweep = run_sweep(oracle::default_bank(), one_code, 5.0, 0.5);
  CHECK(sweep.rank_correlation >= 0.95);
}

TEST_CASE("cli bench") {
  const CliResult r = cli({"bench", "--segments", "2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("path=direct") != std::string::npos);
  CHECK(r.out.find("path=fft") != std::string::npos);

  EncoderConfig direct;
  direct.path = CorrelationPath::kDirect;
  const BenchResult d = run_bench(oracle::default_bank(), direct, 2);
  const BenchResult f = run_bench(oracle::default_bank(), EncoderConfig{}, 2);
  CHECK(d.segments == 2);
  CHECK(f.segments_per_second >= d.segments_per_second);

  const CliResult empty = cli({"bench", "--segments", "0"});
  CHECK(empty.code == 1);
  CHECK(empty.err.rfind("error: ", 0) == 0);
  CHECK(empty.err.find("no input") != std::string::npos);
}

TEST_CASE("more codes per segment improve reconstruction") {
  TempDir dir;
  const std::string wav = dir.file("in.wav");
  const auto x = noise(696 * 3, 0.3, 4);
  write_wav(wav, x, 16000);
  auto snr_for = [&](const std::string& sps) {
    const CliResult r = cli({"encode", wav, "-o", dir.file("s.aer"), "--sps", sps,
                             "--report", dir.file("r.json")});
    REQUIRE(r.code == 0);
    return nlohmann::json::parse(slurp(dir.file("r.json")))["snr_code_db"].get<double>();
  };
  CHECK(snr_for("80") > snr_for("8"));
}

TEST_CASE("feedback threshold on silence emits nothing") {
  TempDir dir;
  const std::string wav = dir.file("in.wav");
  write_wav(wav, std::vector<double>(696 * 3, 0.0), 16000);
  const CliResult r = cli({"encode", wav, "-o", dir.file("s.aer"), "--threshold", "0.01"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("spikes: 0\n") != std::string::npos);
  CHECK(load_aer(dir.file("s.aer"), 120, 16000.0).spikes.empty());
}

TEST_CASE("cli output is deterministic") {
  TempDir dir;
  const std::string wav = dir.file("in.wav");
  write_wav(wav, noise(696 * 5, 0.4, 5), 16000);
  for (const char* fmt : {"binary", "text"}) {
    REQUIRE(cli({"encode", wav, "-o", dir.file("a"), "--codes", dir.file("ca"),
                 "--aer-format", fmt}).code == 0);
    REQUIRE(cli({"encode", wav, "-o", dir.file("b"), "--codes", dir.file("cb"),
                 "--aer-format", fmt}).code == 0);
    CHECK(slurp(dir.file("a")) == slurp(dir.file("b")));
    CHECK(slurp(dir.file("ca")) == slurp(dir.file("cb")));
  }
}

TEST_CASE("cli errors") {
  TempDir dir;
  const std::string wav = dir.file("in.wav");
  write_wav(wav, noise(696, 0.4, 6), 16000);
  write_raw_wav(dir.file("hi.wav"), 1, 1, 44100, 16, 100);

  const std::vector<std::vector<std::string>> failing = {
      {"encode", dir.file("missing.wav"), "-o", dir.file("x")},
      {"encode", dir.file("hi.wav"), "-o", dir.file("x")},
      {"encode", wav, "-o", dir.file("x"), "--fixed", "Q5.27"},
      {"encode", wav, "-o", dir.file("x"), "--fixed", "Q5.28", "--path", "fft"},
      {"encode", wav, "-o", dir.file("x"), "--threshold", "-1"},
      {"encode", wav, "-o", dir.file("x"), "--sps", "4096"},
      {"kernels", "-o", dir.file("x"), "--fmax", "9000"},
      {"kernels", "-o", dir.file("x"), "--count", "0"},
      {"decode", dir.file("missing.aer"), "-o", dir.file("x")},
      {"encode", wav, "-o", dir.file("x"), "--bank", wav},
  };
  for (const auto& args : failing) {
    const CliResult r = cli(args);
    CAPTURE(args[0]);
    CAPTURE(args.back());
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
  const CliResult rate = cli({"encode", dir.file("hi.wav"), "-o", dir.file("x")});
  CHECK(rate.err.find("44100") != std::string::npos);
  CHECK(rate.err.find("16000") != std::string::npos);

  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"encode", wav, "-o", dir.file("x"), "--path", "sideways"}).code == 2);
  const CliResult parse = cli({"encode"});
  CHECK(parse.err.rfind("error: ", 0) == 0);
}

}  // namespace
}  // namespace spiketrum
