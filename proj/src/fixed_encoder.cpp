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

#include "spiketrum/fixed_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "spiketrum/errors.hpp"
#include "spiketrum/fft.hpp"

namespace spiketrum {
namespace {

using fixed::Wide;

// Data words are split at bit 17 into balanced limbs hi * 2^17 + lo with
// lo in [-2^16, 2^16).
constexpr int kDataSplit = 17;

struct Limbs {
  std::vector<double> high;
  std::vector<double> low;
};

Limbs split_limbs(std::span<const std::int64_t> raw, int shift) {
  Limbs out;
  out.high.resize(raw.size());
  out.low.resize(raw.size());
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::int64_t hi = (raw[i] + half) >> shift;
    out.high[i] = static_cast<double>(hi);
    out.low[i] = static_cast<double>(raw[i] - (hi << shift));
  }
  return out;
}

std::int64_t round_to_q(Wide accumulator, QFormat format, bool* saturated) {
  return fixed::saturate(
      fixed::round_shift_rne(accumulator, format.frac_bits), saturated);
}

}  // namespace

std::vector<std::int64_t> correlate_fixed_direct(
    std::span<const std::int64_t> data_raw,
    std::span<const std::int64_t> kernel_raw, QFormat format,
    bool* saturated) {
  const std::size_t n = data_raw.size();
  if (n == 0 || kernel_raw.size() > n) {
    throw ParameterError("kernel longer than the buffer");
  }
  std::vector<std::int64_t> r(n);
  for (std::size_t u = 0; u < n; ++u) {
    Wide acc = 0;
    for (std::size_t t = 0; t < kernel_raw.size(); ++t) {
      acc += Wide{data_raw[(u + t) % n]} * kernel_raw[t];
    }
    r[u] = round_to_q(acc, format, saturated);
  }
  return r;
}

FixedPointEncoder::FixedPointEncoder(const KernelBank& bank, QFormat format)
    : format_(format),
      transform_size_(bank.transform_size()),
      kernel_split_((format.frac_bits + 1) / 2) {
  format_.validate();
  const RealFft fft(transform_size_);
  kernels_.resize(bank.size());
  for (std::size_t m = 0; m < bank.size(); ++m) {
    QuantizedKernel& k = kernels_[m];
    k.raw.resize(bank.kernel_length());
    for (std::size_t t = 0; t < k.raw.size(); ++t) {
      k.raw[t] = to_fixed(bank[m].samples[t], format_).raw;
    }
    Limbs limbs = split_limbs(k.raw, kernel_split_);
    limbs.high.resize(transform_size_, 0.0);
    limbs.low.resize(transform_size_, 0.0);
    k.high_spectrum.resize(fft.bins());
    k.low_spectrum.resize(fft.bins());
    fft.forward(limbs.high, k.high_spectrum);
    fft.forward(limbs.low, k.low_spectrum);
  }
}

std::vector<std::int64_t> FixedPointEncoder::correlate(
    std::span<const std::int64_t> data_raw, bool* saturated) const {
  const std::size_t n = transform_size_;
  if (data_raw.size() != n) {
    throw ParameterError("buffer length does not match bank transform size");
  }
  const RealFft fft(n);
  const Limbs data = split_limbs(data_raw, kDataSplit);
  std::vector<std::complex<double>> data_high(fft.bins());
  std::vector<std::complex<double>> data_low(fft.bins());
  fft.forward(data.high, data_high);
  fft.forward(data.low, data_low);

  std::vector<std::int64_t> out(kernels_.size() * n);
  std::vector<std::complex<double>> product(fft.bins());
  std::vector<double> partial[4];
  for (auto& p : partial) p.resize(n);

  for (std::size_t m = 0; m < kernels_.size(); ++m) {
    const QuantizedKernel& k = kernels_[m];
    const std::vector<std::complex<double>>* lhs[4] = {&data_high, &data_high,
                                                       &data_low, &data_low};
    const std::vector<std::complex<double>>* rhs[4] = {
        &k.high_spectrum, &k.low_spectrum, &k.high_spectrum, &k.low_spectrum};
    for (int p = 0; p < 4; ++p) {
      for (std::size_t b = 0; b < product.size(); ++b) {
        product[b] = (*lhs[p])[b] * std::conj((*rhs[p])[b]);
      }
      fft.inverse(product, partial[p]);
    }

    std::int64_t* row = out.data() + m * n;
    bool exact = true;
    for (std::size_t u = 0; u < n && exact; ++u) {
      Wide sums[4];
      for (int p = 0; p < 4; ++p) {
        const double v = partial[p][u];
        const double nearest = std::nearbyint(v);
        if (!(std::abs(v - nearest) <= 0.125)) {
          exact = false;
          break;
        }
        sums[p] = static_cast<Wide>(static_cast<std::int64_t>(nearest));
      }
      if (!exact) break;
      const Wide acc = (sums[0] << (kDataSplit + kernel_split_)) +
                       (sums[1] << kDataSplit) + (sums[2] << kernel_split_) +
                       sums[3];
      row[u] = round_to_q(acc, format_, saturated);
    }
    if (!exact) {
      ++fallbacks_;
      const std::vector<std::int64_t> direct =
          correlate_fixed_direct(data_raw, k.raw, format_, saturated);
      std::copy(direct.begin(), direct.end(), row);
    }
  }
  return out;
}

namespace {

Wide raw_energy(std::span<const std::int64_t> raw) {
  Wide e = 0;
  for (std::int64_t v : raw) e += Wide{v} * v;
  return e;
}

}  // namespace

std::vector<Code> FixedPointEncoder::encode(SegmentBuffer& buffer,
                                            const EncoderConfig& config,
                                            FixedEncodeTrace* trace) const {
  if (config.fixed && !(*config.fixed == format_)) {
    throw ParameterError("encoder built for " + format_.to_string() +
                         " but config asks for " + config.fixed->to_string());
  }
  if (!std::isfinite(config.feedback_threshold) ||
      config.feedback_threshold < 0.0) {
    throw ParameterError("feedback threshold must be finite and >= 0");
  }
  const std::size_t n = transform_size_;
  if (buffer.data.size() != n) {
    throw ParameterError("buffer length does not match bank transform size");
  }
  bool saturated = false;
  std::vector<std::int64_t> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Q34 q = to_fixed(buffer.data[i], format_);
    data[i] = q.raw;
    saturated = saturated || q.saturated;
  }
  const Q34 threshold = to_fixed(config.feedback_threshold, format_);
  saturated = saturated || threshold.saturated;

  if (trace) trace->residual_energy_raw.push_back(raw_energy(data));

  std::vector<Code> codes;
  for (std::size_t it = 0; it < config.max_codes_per_segment; ++it) {
    const std::vector<std::int64_t> r = correlate(data, &saturated);
    std::size_t best = 0;
    std::int64_t best_abs = -1;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::int64_t a = r[i] < 0 ? -r[i] : r[i];
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    const std::int64_t s_raw = r.empty() ? 0 : r[best];
    if (best_abs < threshold.raw) break;

    Code code;
    code.m = best / n;
    const std::size_t lag = best % n;
    code.tau = lag_to_tau(lag, n);
    code.s = to_float(Q34{s_raw, format_, false});
    code.segment_index = buffer.segment_index;
    code.iteration = it;

    const std::vector<std::int64_t>& k = kernels_[code.m].raw;
    for (std::size_t t = 0; t < k.size(); ++t) {
      const std::int64_t scaled =
          round_to_q(Wide{s_raw} * k[t], format_, &saturated);
      std::int64_t& slot = data[(lag + t) % n];
      slot = fixed::saturate(Wide{slot} - scaled, &saturated);
    }
    codes.push_back(code);

    if (trace) {
      const Wide e = raw_energy(data);
      if (e > trace->residual_energy_raw.back()) trace->energy_increased = true;
      trace->residual_energy_raw.push_back(e);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    buffer.data[i] = to_float(Q34{data[i], format_, false});
  }
  if (trace) trace->saturated = trace->saturated || saturated;
  return codes;
}

std::vector<Code> encode_segment_fixed(SegmentBuffer& buffer,
                                       const KernelBank& bank,
                                       const EncoderConfig& config) {
  if (!config.fixed) {
    throw ParameterError("encode_segment_fixed needs a fixed-point format");
  }
  config.validate(bank);
  const FixedPointEncoder encoder(bank, *config.fixed);
  return encoder.encode(buffer, config);
}

ParityReport run_fixed_parity(std::span<const SegmentBuffer> segments,
                              const KernelBank& bank,
                              const EncoderConfig& config) {
  if (!config.fixed) {
    throw ParameterError("parity run needs a fixed-point format");
  }
  EncoderConfig float_config = config;
  float_config.fixed.reset();
  float_config.path = CorrelationPath::kFft;
  float_config.validate(bank);
  const FixedPointEncoder encoder(bank, *config.fixed);

  struct SegmentResult {
    std::vector<Code> reference;
    std::vector<Code> fixed;
    FixedEncodeTrace trace;
  };
  std::vector<SegmentResult> results(segments.size());
  detail::parallel_for(segments.size(), config.threads, [&](std::size_t i) {
    SegmentBuffer a = segments[i];
    SegmentBuffer b = segments[i];
    results[i].reference = encode_segment(a, bank, float_config);
    results[i].fixed = encoder.encode(b, config, &results[i].trace);
  });

  ParityReport report;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SegmentResult& r = results[i];
    const std::size_t len = std::max(r.reference.size(), r.fixed.size());
    for (std::size_t j = 0; j < len; ++j) {
      ++report.compared;
      const bool both = j < r.reference.size() && j < r.fixed.size();
      if (both && r.reference[j].m == r.fixed[j].m &&
          r.reference[j].tau == r.fixed[j].tau) {
        ++report.matched;
        continue;
      }
      ParityMismatch mismatch;
      mismatch.segment_index = segments[i].segment_index;
      mismatch.iteration = j;
      if (j < r.reference.size()) mismatch.float_code = r.reference[j];
      if (j < r.fixed.size()) mismatch.fixed_code = r.fixed[j];
      report.mismatches.push_back(mismatch);
    }
    if (r.trace.energy_increased) {
      report.energy_increase_segments.push_back(segments[i].segment_index);
    }
    report.saturated = report.saturated || r.trace.saturated;
  }
  return report;
}

}  // namespace spiketrum
