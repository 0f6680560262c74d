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

// Waveform reconstruction from codes or spikes by linear superposition of
// scaled, shifted kernels, and the quality metrics reported for an encoding.

#ifndef SPIKETRUM_DECODER_METRICS_HPP_
#define SPIKETRUM_DECODER_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spiketrum/itp_coder.hpp"
#include "spiketrum/kernel_bank.hpp"
#include "spiketrum/mp_encoder.hpp"

namespace spiketrum {

inline constexpr double kSnrCapDb = 300.0;

// x_hat[n] = sum_i s_i phi_{m_i}[n - (segment_i * S + tau_i)], samples outside
// [0, output_length) dropped. Throws ParameterError for unknown kernels.
std::vector<double> reconstruct_from_codes(std::span<const Code> codes,
                                           const KernelBank& bank,
                                           std::size_t output_length);

// The same sum for the codes of one segment, placed circularly in that
// segment's transform-size buffer. Input buffer minus this equals the
// encoder's final residual.
std::vector<double> reconstruct_segment_window(std::span<const Code> codes,
                                               const KernelBank& bank);

// Codes recovered from the spikes (level intensity, clamped delay), then
// superposed as in reconstruct_from_codes.
std::vector<double> reconstruct_from_spikes(std::span<const SpikeEvent> spikes,
                                            const KernelBank& bank,
                                            const ChannelMap& map,
                                            std::size_t output_length);

// 10 log10(|x|^2 / |x - x_hat|^2), capped at kSnrCapDb. Throws
// ParameterError for length mismatch or a zero-energy original.
double snr_db(std::span<const double> original,
              std::span<const double> reconstructed);

// Shannon entropy (bits) of the empirical channel-usage distribution.
double spike_entropy(std::span<const SpikeEvent> spikes,
                     std::size_t total_channels);

// Percentage of channels that fired at least once.
double sparsity_percent(std::span<const SpikeEvent> spikes,
                        std::size_t total_channels);

// Spearman rank correlation with average ranks for ties; 0 when either
// series is constant.
double spearman_rank_correlation(std::span<const double> a,
                                 std::span<const double> b);

struct ReconstructionReport {
  std::optional<std::size_t> code_count;
  std::size_t spike_count = 0;
  double spikes_per_second = 0.0;
  std::optional<double> residual_energy;
  std::optional<double> snr_code_db;
  std::optional<double> snr_spike_db;
  double entropy_bits = 0.0;
  double sparsity_percent = 0.0;

  // JSON object with every key present; unknown values are null.
  std::string to_json() const;
};

// Full report for one stream encoding of `original`.
ReconstructionReport make_encoding_report(std::span<const double> original,
                                          const StreamEncoding& encoding,
                                          std::span<const SpikeEvent> spikes,
                                          const KernelBank& bank,
                                          const ChannelMap& map);

}  // namespace spiketrum

#endif  // SPIKETRUM_DECODER_METRICS_HPP_
