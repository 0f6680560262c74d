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

#include "spiketrum/kernel_bank.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "binary_io.hpp"
#include "spiketrum/errors.hpp"
#include "spiketrum/fft.hpp"

namespace spiketrum {

double erb_rate(double hz) { return 21.4 * std::log10(4.37 * hz / 1000.0 + 1.0); }

double erb_rate_to_hz(double erb) {
  return (1000.0 / 4.37) * (std::pow(10.0, erb / 21.4) - 1.0);
}

double erb_bandwidth(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }

std::vector<double> erb_center_frequencies(std::size_t count, double fmin,
                                           double fmax) {
  if (count < 2) throw ParameterError("need at least 2 center frequencies");
  if (!(fmin > 0.0) || !(fmax > fmin) || !std::isfinite(fmax)) {
    throw ParameterError("invalid frequency range [" + std::to_string(fmin) +
                         ", " + std::to_string(fmax) + "]");
  }
  const double lo = erb_rate(fmin);
  const double step = (erb_rate(fmax) - lo) / static_cast<double>(count - 1);
  std::vector<double> freqs(count);
  freqs.front() = fmin;
  freqs.back() = fmax;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    freqs[i] = erb_rate_to_hz(lo + step * static_cast<double>(i));
  }
  return freqs;
}

std::vector<double> generate_gammatone(double fc, double fs,
                                       std::size_t length, int order) {
  if (!(fs > 0.0)) throw ParameterError("sample rate must be positive");
  // fc == fs / 2 is admitted: the default bank's top kernel sits at Nyquist.
  if (!(fc > 0.0) || fc > fs / 2.0) {
    throw ParameterError("center frequency " + std::to_string(fc) +
                         " Hz outside (0, " + std::to_string(fs / 2.0) + "]");
  }
  if (length == 0) throw ParameterError("kernel length must be >= 1");
  if (order < 1) throw ParameterError("gammatone order must be >= 1");

  const double two_pi = 2.0 * std::numbers::pi;
  const double decay = two_pi * kErbBandwidthFactor * erb_bandwidth(fc);
  std::vector<double> g(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / fs;
    g[i] = std::pow(t, order - 1) * std::exp(-decay * t) *
           std::cos(two_pi * fc * t);
  }
  double energy = 0.0;
  for (double v : g) energy += v * v;
  if (!(energy > 0.0)) {
    throw ParameterError("gammatone has zero energy at length " +
                         std::to_string(length));
  }
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : g) v *= scale;
  return g;
}

void BankConfig::validate() const {
  if (kernel_count < 2) throw ParameterError("bank needs at least 2 kernels");
  if (kernel_length < 1) throw ParameterError("kernel length must be >= 1");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ParameterError("sample rate must be positive and finite");
  }
  if (!(fmin > 0.0) || !(fmax > fmin) || fmax > sample_rate / 2.0) {
    throw ParameterError("frequency range must satisfy 0 < fmin < fmax <= "
                         "sample_rate / 2");
  }
  if (order < 1) throw ParameterError("gammatone order must be >= 1");
}

KernelBank::KernelBank(const BankConfig& config,
                       std::vector<double> center_freqs,
                       std::vector<std::vector<double>> samples)
    : config_(config), transform_size_(std::bit_ceil(config.kernel_length)) {
  if (center_freqs.size() != config.kernel_count ||
      samples.size() != config.kernel_count) {
    throw ParameterError("kernel count does not match bank configuration");
  }
  if (transform_size_ < 2) transform_size_ = 2;
  const RealFft fft(transform_size_);
  std::vector<double> padded(transform_size_);
  kernels_.reserve(config.kernel_count);
  for (std::size_t m = 0; m < config.kernel_count; ++m) {
    if (samples[m].size() != config.kernel_length) {
      throw ParameterError("kernel " + std::to_string(m) +
                           " has the wrong length");
    }
    Kernel k;
    k.index = m;
    k.center_freq = center_freqs[m];
    k.samples = std::move(samples[m]);
    std::fill(padded.begin(), padded.end(), 0.0);
    std::copy(k.samples.begin(), k.samples.end(), padded.begin());
    k.spectrum.resize(fft.bins());
    fft.forward(padded, k.spectrum);
    kernels_.push_back(std::move(k));
  }
}

bool operator==(const KernelBank& a, const KernelBank& b) {
  const BankConfig& x = a.config_;
  const BankConfig& y = b.config_;
  if (x.kernel_count != y.kernel_count || x.kernel_length != y.kernel_length ||
      x.sample_rate != y.sample_rate || x.fmin != y.fmin || x.fmax != y.fmax ||
      x.order != y.order) {
    return false;
  }
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m].center_freq != b[m].center_freq ||
        a[m].samples != b[m].samples || a[m].spectrum != b[m].spectrum) {
      return false;
    }
  }
  return true;
}

KernelBank build_bank(const BankConfig& config) {
  config.validate();
  std::vector<double> freqs =
      erb_center_frequencies(config.kernel_count, config.fmin, config.fmax);
  std::vector<std::vector<double>> samples;
  samples.reserve(freqs.size());
  for (double fc : freqs) {
    samples.push_back(generate_gammatone(fc, config.sample_rate,
                                         config.kernel_length, config.order));
  }
  return KernelBank(config, std::move(freqs), std::move(samples));
}

void save_bank(const KernelBank& bank, const std::string& path) {
  const BankConfig& c = bank.config();
  detail::ByteWriter w;
  w.put_magic("SPKB");
  w.put<std::uint32_t>(kBankFileVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.kernel_count));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.kernel_length));
  w.put<double>(c.sample_rate);
  w.put<double>(c.fmin);
  w.put<double>(c.fmax);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.order));
  for (const Kernel& k : bank.kernels()) {
    w.put<double>(k.center_freq);
    for (double v : k.samples) w.put<double>(v);
  }
  detail::write_file_bytes(path, w.bytes());
}

KernelBank load_bank(const std::string& path) {
  detail::ByteReader r(detail::read_file_bytes(path));
  r.expect_magic("SPKB");
  const std::uint64_t version_at = r.offset();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kBankFileVersion) {
    throw FormatError("unsupported bank version " + std::to_string(version),
                      version_at);
  }
  BankConfig c;
  const std::uint64_t header_at = r.offset();
  c.kernel_count = r.get<std::uint32_t>("kernel_count");
  c.kernel_length = r.get<std::uint32_t>("kernel_length");
  c.sample_rate = r.get<double>("sample_rate");
  c.fmin = r.get<double>("fmin");
  c.fmax = r.get<double>("fmax");
  c.order = static_cast<int>(r.get<std::uint32_t>("order"));
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid bank header: ") + e.what(),
                      header_at);
  }
  const std::uint64_t body =
      static_cast<std::uint64_t>(c.kernel_count) * (c.kernel_length + 1) * 8;
  if (r.remaining() < body) {
    throw FormatError("truncated bank body: need " + std::to_string(body) +
                          " bytes, have " + std::to_string(r.remaining()),
                      r.offset() + r.remaining());
  }
  std::vector<double> freqs(c.kernel_count);
  std::vector<std::vector<double>> samples(c.kernel_count);
  for (std::size_t m = 0; m < c.kernel_count; ++m) {
    freqs[m] = r.get<double>("center_freq");
    samples[m].resize(c.kernel_length);
    for (double& v : samples[m]) {
      const std::uint64_t at = r.offset();
      v = r.get<double>("kernel sample");
      if (!std::isfinite(v)) throw FormatError("non-finite kernel sample", at);
    }
  }
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes after bank body", r.offset());
  }
  return KernelBank(c, std::move(freqs), std::move(samples));
}

}  // namespace spiketrum
