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

#include "spiketrum/mp_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "parallel.hpp"
#include "spiketrum/errors.hpp"
#include "spiketrum/fft.hpp"
#include "spiketrum/fixed_encoder.hpp"

namespace spiketrum {

double SegmentBuffer::energy() const {
  double e = 0.0;
  for (double v : data) e += v * v;
  return e;
}

void EncoderConfig::validate(const KernelBank& bank) const {
  if (max_codes_per_segment > bank.transform_size()) {
    throw ParameterError("spikes per segment " +
                         std::to_string(max_codes_per_segment) +
                         " exceeds the lag count " +
                         std::to_string(bank.transform_size()));
  }
  if (!std::isfinite(feedback_threshold) || feedback_threshold < 0.0) {
    throw ParameterError("feedback threshold must be finite and >= 0");
  }
  if (fixed) {
    fixed->validate();
    if (path != CorrelationPath::kDirect) {
      throw ParameterError("fixed-point mode requires the direct path");
    }
  }
}

std::vector<SegmentBuffer> segment_stream(std::span<const double> samples,
                                          std::size_t segment_size,
                                          std::size_t transform_size) {
  if (segment_size == 0 || segment_size > transform_size) {
    throw ParameterError("segment size must be in [1, transform size]");
  }
  const std::size_t count =
      (samples.size() + segment_size - 1) / segment_size;
  std::vector<SegmentBuffer> buffers(count);
  for (std::size_t i = 0; i < count; ++i) {
    SegmentBuffer& b = buffers[i];
    const std::size_t begin = i * segment_size;
    b.segment_index = i;
    b.valid_samples = std::min(segment_size, samples.size() - begin);
    b.data.assign(transform_size, 0.0);
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                b.valid_samples, b.data.begin());
  }
  return buffers;
}

std::vector<SegmentBuffer> segment_stream(std::span<const double> samples,
                                          const KernelBank& bank) {
  return segment_stream(samples, bank.segment_size(), bank.transform_size());
}

namespace {

void check_buffer(const SegmentBuffer& buffer, const Kernel& kernel) {
  const std::size_t n = buffer.data.size();
  if (n == 0 || (n & (n - 1)) != 0 || kernel.samples.size() > n) {
    throw ParameterError("buffer length " + std::to_string(n) +
                         " incompatible with kernel length " +
                         std::to_string(kernel.samples.size()));
  }
}

void correlate_direct_into(std::span<const double> data,
                           std::span<const double> kernel,
                           std::span<double> out) {
  const std::size_t n = data.size();
  const std::size_t len = kernel.size();
  // Unrolled circular buffer so the inner loop runs over contiguous lags.
  thread_local std::vector<double> ext;
  ext.resize(n + len);
  for (std::size_t i = 0; i < n + len; ++i) ext[i] = data[i % n];
  std::fill(out.begin(), out.end(), 0.0);
  double* r = out.data();
  for (std::size_t t = 0; t < len; ++t) {
    const double w = kernel[t];
    const double* x = ext.data() + t;
    for (std::size_t u = 0; u < n; ++u) r[u] += w * x[u];
  }
}

void correlate_spectrum_into(std::span<const std::complex<double>> data_spec,
                             const Kernel& kernel, const RealFft& fft,
                             std::span<double> out) {
  thread_local std::vector<std::complex<double>> product;
  product.resize(data_spec.size());
  for (std::size_t k = 0; k < data_spec.size(); ++k) {
    product[k] = data_spec[k] * std::conj(kernel.spectrum[k]);
  }
  fft.inverse(product, out);
}

void correlate_all_into(const SegmentBuffer& buffer, const KernelBank& bank,
                        CorrelationPath path, CorrelationMatrix& out) {
  if (buffer.data.size() != bank.transform_size()) {
    throw ParameterError("buffer length does not match bank transform size");
  }
  if (path == CorrelationPath::kDirect) {
    for (std::size_t m = 0; m < bank.size(); ++m) {
      correlate_direct_into(buffer.data, bank[m].samples, out.row(m));
    }
    return;
  }
  const RealFft fft(bank.transform_size());
  thread_local std::vector<std::complex<double>> spectrum;
  spectrum.resize(fft.bins());
  fft.forward(buffer.data, spectrum);
  for (std::size_t m = 0; m < bank.size(); ++m) {
    correlate_spectrum_into(spectrum, bank[m], fft, out.row(m));
  }
}

}  // namespace

std::vector<double> correlate_direct(const SegmentBuffer& buffer,
                                     const Kernel& kernel) {
  check_buffer(buffer, kernel);
  std::vector<double> r(buffer.data.size());
  correlate_direct_into(buffer.data, kernel.samples, r);
  return r;
}

std::vector<double> correlate_fft(const SegmentBuffer& buffer,
                                  const Kernel& kernel) {
  check_buffer(buffer, kernel);
  const RealFft fft(buffer.data.size());
  if (kernel.spectrum.size() != fft.bins()) {
    throw ParameterError("kernel spectrum was computed for another size");
  }
  std::vector<std::complex<double>> spectrum(fft.bins());
  fft.forward(buffer.data, spectrum);
  std::vector<double> r(buffer.data.size());
  correlate_spectrum_into(spectrum, kernel, fft, r);
  return r;
}

CorrelationMatrix correlate_all(const SegmentBuffer& buffer,
                                const KernelBank& bank, CorrelationPath path) {
  CorrelationMatrix out(bank.size(), bank.transform_size());
  correlate_all_into(buffer, bank, path, out);
  return out;
}

std::int32_t lag_to_tau(std::size_t lag, std::size_t transform_size) {
  const auto u = static_cast<std::int64_t>(lag % transform_size);
  const auto n = static_cast<std::int64_t>(transform_size);
  return static_cast<std::int32_t>(u < n / 2 ? u : u - n);
}

std::size_t tau_to_lag(std::int32_t tau, std::size_t transform_size) {
  const auto n = static_cast<std::int64_t>(transform_size);
  return static_cast<std::size_t>(((tau % n) + n) % n);
}

Code find_best_code(const CorrelationMatrix& correlations,
                    std::size_t segment_index, std::size_t iteration) {
  std::size_t best_m = 0;
  std::size_t best_u = 0;
  double best_abs = -1.0;
  for (std::size_t m = 0; m < correlations.rows(); ++m) {
    const std::span<const double> row = correlations.row(m);
    for (std::size_t u = 0; u < row.size(); ++u) {
      const double a = std::abs(row[u]);
      if (a > best_abs) {
        best_abs = a;
        best_m = m;
        best_u = u;
      }
    }
  }
  Code code;
  code.m = best_m;
  code.tau = lag_to_tau(best_u, correlations.cols());
  code.s = correlations.rows() == 0 ? 0.0 : correlations.row(best_m)[best_u];
  code.segment_index = segment_index;
  code.iteration = iteration;
  return code;
}

void subtract_component(SegmentBuffer& buffer, const Kernel& kernel,
                        std::int32_t tau, double s) {
  check_buffer(buffer, kernel);
  const std::size_t n = buffer.data.size();
  const auto half = static_cast<std::int64_t>(n / 2);
  if (tau < -half || tau > half) {
    throw ParameterError("tau " + std::to_string(tau) + " outside [-" +
                         std::to_string(half) + ", " + std::to_string(half) +
                         "]");
  }
  if (s == 0.0) return;
  const std::size_t lag = tau_to_lag(tau, n);
  for (std::size_t t = 0; t < kernel.samples.size(); ++t) {
    buffer.data[(lag + t) % n] -= s * kernel.samples[t];
  }
}

std::vector<Code> encode_segment(SegmentBuffer& buffer, const KernelBank& bank,
                                 const EncoderConfig& config) {
  config.validate(bank);
  if (config.fixed) return encode_segment_fixed(buffer, bank, config);
  if (buffer.data.size() != bank.transform_size()) {
    throw ParameterError("buffer length does not match bank transform size");
  }
  std::vector<Code> codes;
  CorrelationMatrix correlations(bank.size(), bank.transform_size());
  for (std::size_t it = 0; it < config.max_codes_per_segment; ++it) {
    correlate_all_into(buffer, bank, config.path, correlations);
    const Code code = find_best_code(correlations, buffer.segment_index, it);
    if (feedback_should_stop(code, config.feedback_threshold)) break;
    subtract_component(buffer, bank[code.m], code.tau, code.s);
    codes.push_back(code);
  }
  return codes;
}

double StreamEncoding::total_residual_energy() const {
  double sum = 0.0;
  for (double e : residual_energies) sum += e;
  return sum;
}

StreamEncoding encode_stream(std::span<const double> samples,
                             const KernelBank& bank,
                             const EncoderConfig& config) {
  config.validate(bank);
  std::vector<SegmentBuffer> segments = segment_stream(samples, bank);
  std::vector<std::vector<Code>> per_segment(segments.size());
  StreamEncoding result;
  result.segment_count = segments.size();
  result.sample_count = samples.size();
  result.residual_energies.assign(segments.size(), 0.0);

  std::optional<FixedPointEncoder> fixed_encoder;
  if (config.fixed) fixed_encoder.emplace(bank, *config.fixed);

  detail::parallel_for(segments.size(), config.threads, [&](std::size_t i) {
    per_segment[i] = fixed_encoder
                         ? fixed_encoder->encode(segments[i], config)
                         : encode_segment(segments[i], bank, config);
    result.residual_energies[i] = segments[i].energy();
  });

  for (auto& codes : per_segment) {
    result.codes.insert(result.codes.end(), codes.begin(), codes.end());
  }
  return result;
}

}  // namespace spiketrum
