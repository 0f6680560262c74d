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

// Gammatone kernel dictionary: 40 unit-norm kernels spaced uniformly on the
// ERB-rate scale, each with a cached real-input spectrum at the transform
// size used by the encoder.

#ifndef SPIKETRUM_KERNEL_BANK_HPP_
#define SPIKETRUM_KERNEL_BANK_HPP_

#include <complex>
#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace spiketrum {

inline constexpr std::size_t kDefaultKernelCount = 40;
inline constexpr std::size_t kDefaultKernelLength = 1353;
inline constexpr double kDefaultSampleRate = 16000.0;
inline constexpr double kDefaultFmin = 20.0;
inline constexpr double kDefaultFmax = 8000.0;
inline constexpr int kDefaultGammatoneOrder = 4;
// Glasberg-Moore bandwidth scaling b in exp(-2 pi b ERB(fc) t).
inline constexpr double kErbBandwidthFactor = 1.019;

// Glasberg-Moore ERB-rate E(f) = 21.4 log10(4.37 f / 1000 + 1).
double erb_rate(double hz);
double erb_rate_to_hz(double erb);
// Equivalent rectangular bandwidth 24.7 (4.37 f / 1000 + 1), in Hz.
double erb_bandwidth(double hz);

// `count` frequencies uniformly spaced in ERB-rate with endpoints exactly
// fmin and fmax. Throws ParameterError unless count >= 2 and
// 0 < fmin < fmax.
std::vector<double> erb_center_frequencies(std::size_t count, double fmin,
                                           double fmax);

// Order-`order` gammatone t^(n-1) exp(-2 pi b ERB(fc) t) cos(2 pi fc t),
// sampled from t = 0, truncated to `length` samples and scaled to unit L2
// norm. Throws ParameterError for fc <= 0, fc > fs / 2, length == 0 or
// order < 1.
std::vector<double> generate_gammatone(double fc, double fs,
                                       std::size_t length,
                                       int order = kDefaultGammatoneOrder);

struct BankConfig {
  std::size_t kernel_count = kDefaultKernelCount;
  std::size_t kernel_length = kDefaultKernelLength;
  double sample_rate = kDefaultSampleRate;
  double fmin = kDefaultFmin;
  double fmax = kDefaultFmax;
  int order = kDefaultGammatoneOrder;

  void validate() const;
};

struct Kernel {
  std::size_t index = 0;
  double center_freq = 0.0;
  std::vector<double> samples;
  // Transform of `samples` zero-padded to the bank's transform size;
  // transform_size / 2 + 1 bins (the remainder is the conjugate mirror).
  std::vector<std::complex<double>> spectrum;
};

// Immutable once built; safe for concurrent readers.
class KernelBank {
 public:
  // Takes ownership of pre-generated samples and computes the spectra.
  KernelBank(const BankConfig& config, std::vector<double> center_freqs,
             std::vector<std::vector<double>> samples);

  std::size_t size() const { return kernels_.size(); }
  const Kernel& operator[](std::size_t m) const { return kernels_[m]; }
  const std::vector<Kernel>& kernels() const { return kernels_; }
  const BankConfig& config() const { return config_; }

  double sample_rate() const { return config_.sample_rate; }
  std::size_t kernel_length() const { return config_.kernel_length; }
  // Smallest power of two holding one kernel (2048 for L = 1353).
  std::size_t transform_size() const { return transform_size_; }
  // Segment length S = N - L + 1, so that a segment correlated against a
  // kernel fits the transform without aliasing (696 for the default bank).
  std::size_t segment_size() const {
    return transform_size_ - config_.kernel_length + 1;
  }

  friend bool operator==(const KernelBank& a, const KernelBank& b);

 private:
  BankConfig config_;
  std::size_t transform_size_;
  std::vector<Kernel> kernels_;
};

KernelBank build_bank(const BankConfig& config = {});

// Binary bank file, little-endian: "SPKB", u32 version, u32 kernel_count,
// u32 kernel_length, f64 sample_rate, f64 fmin, f64 fmax, u32 order, then
// per kernel f64 center_freq and kernel_length f64 samples.
inline constexpr std::uint32_t kBankFileVersion = 1;

void save_bank(const KernelBank& bank, const std::string& path);
// Throws FormatError (with the failing byte offset) on bad magic, version
// mismatch, invalid header fields or truncation.
KernelBank load_bank(const std::string& path);

}  // namespace spiketrum

#endif  // SPIKETRUM_KERNEL_BANK_HPP_
