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

#include "spiketrum/decoder_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "spiketrum/errors.hpp"

namespace spiketrum {
namespace {

void add_kernel(std::vector<double>& out, const Kernel& kernel,
                std::int64_t start, double s) {
  const auto len = static_cast<std::int64_t>(out.size());
  const auto klen = static_cast<std::int64_t>(kernel.samples.size());
  const std::int64_t t0 = std::max<std::int64_t>(0, -start);
  const std::int64_t t1 = std::min<std::int64_t>(klen, len - start);
  for (std::int64_t t = t0; t < t1; ++t) {
    out[static_cast<std::size_t>(start + t)] +=
        s * kernel.samples[static_cast<std::size_t>(t)];
  }
}

const Kernel& kernel_for(const KernelBank& bank, std::size_t m) {
  if (m >= bank.size()) {
    throw ParameterError("code references kernel " + std::to_string(m) +
                         " but the bank has " + std::to_string(bank.size()));
  }
  return bank[m];
}

}  // namespace

std::vector<double> reconstruct_from_codes(std::span<const Code> codes,
                                           const KernelBank& bank,
                                           std::size_t output_length) {
  std::vector<double> out(output_length, 0.0);
  const auto seg = static_cast<std::int64_t>(bank.segment_size());
  for (const Code& c : codes) {
    const Kernel& k = kernel_for(bank, c.m);
    add_kernel(out, k, static_cast<std::int64_t>(c.segment_index) * seg + c.tau,
               c.s);
  }
  return out;
}

std::vector<double> reconstruct_segment_window(std::span<const Code> codes,
                                               const KernelBank& bank) {
  const std::size_t n = bank.transform_size();
  std::vector<double> out(n, 0.0);
  for (const Code& c : codes) {
    const Kernel& k = kernel_for(bank, c.m);
    const std::size_t lag = tau_to_lag(c.tau, n);
    for (std::size_t t = 0; t < k.samples.size(); ++t) {
      out[(lag + t) % n] += c.s * k.samples[t];
    }
  }
  return out;
}

std::vector<double> reconstruct_from_spikes(std::span<const SpikeEvent> spikes,
                                            const KernelBank& bank,
                                            const ChannelMap& map,
                                            std::size_t output_length) {
  const std::vector<Code> codes =
      spikes_to_codes(spikes, map, bank.segment_size());
  return reconstruct_from_codes(codes, bank, output_length);
}

double snr_db(std::span<const double> original,
              std::span<const double> reconstructed) {
  if (original.size() != reconstructed.size()) {
    throw ParameterError("snr_db: length mismatch (" +
                         std::to_string(original.size()) + " vs " +
                         std::to_string(reconstructed.size()) + ")");
  }
  double signal = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    signal += original[i] * original[i];
    const double d = original[i] - reconstructed[i];
    error += d * d;
  }
  if (!(signal > 0.0)) throw ParameterError("snr_db: original has zero energy");
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / error));
}

double spike_entropy(std::span<const SpikeEvent> spikes,
                     std::size_t total_channels) {
  if (spikes.empty()) return 0.0;
  std::vector<std::size_t> counts(total_channels, 0);
  for (const SpikeEvent& e : spikes) {
    if (e.channel >= total_channels) {
      throw ParameterError("spike channel outside the channel map");
    }
    ++counts[e.channel];
  }
  const double total = static_cast<double>(spikes.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double sparsity_percent(std::span<const SpikeEvent> spikes,
                        std::size_t total_channels) {
  if (total_channels == 0) return 0.0;
  std::vector<bool> active(total_channels, false);
  for (const SpikeEvent& e : spikes) {
    if (e.channel >= total_channels) {
      throw ParameterError("spike channel outside the channel map");
    }
    active[e.channel] = true;
  }
  const auto n = std::count(active.begin(), active.end(), true);
  return 100.0 * static_cast<double>(n) / static_cast<double>(total_channels);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rank_correlation(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ParameterError("spearman: length mismatch");
  }
  if (a.size() < 2) return 0.0;
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::string ReconstructionReport::to_json() const {
  auto opt = [](const auto& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["code_count"] = opt(code_count);
  j["spike_count"] = spike_count;
  j["spikes_per_second"] = spikes_per_second;
  j["residual_energy"] = opt(residual_energy);
  j["snr_code_db"] = opt(snr_code_db);
  j["snr_spike_db"] = opt(snr_spike_db);
  j["entropy_bits"] = entropy_bits;
  j["sparsity_percent"] = sparsity_percent;
  return j.dump(2) + "\n";
}

ReconstructionReport make_encoding_report(std::span<const double> original,
                                          const StreamEncoding& encoding,
                                          std::span<const SpikeEvent> spikes,
                                          const KernelBank& bank,
                                          const ChannelMap& map) {
  ReconstructionReport report;
  report.code_count = encoding.codes.size();
  report.spike_count = spikes.size();
  const double seconds =
      static_cast<double>(original.size()) / bank.sample_rate();
  report.spikes_per_second =
      seconds > 0.0 ? static_cast<double>(spikes.size()) / seconds : 0.0;
  report.residual_energy = encoding.total_residual_energy();
  double energy = 0.0;
  for (double v : original) energy += v * v;
  if (energy > 0.0) {
    report.snr_code_db = snr_db(
        original, reconstruct_from_codes(encoding.codes, bank, original.size()));
    report.snr_spike_db = snr_db(
        original,
        reconstruct_from_spikes(spikes, bank, map, original.size()));
  }
  report.entropy_bits = spike_entropy(spikes, map.total_channels());
  report.sparsity_percent = sparsity_percent(spikes, map.total_channels());
  return report;
}

}  // namespace spiketrum
