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

// Command-line surface: `spiketrum {encode|decode|kernels|sweep|bench}`.
// Every command is also callable in-process for testing.

#ifndef SPIKETRUM_COMMANDS_HPP_
#define SPIKETRUM_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spiketrum/itp_coder.hpp"
#include "spiketrum/kernel_bank.hpp"
#include "spiketrum/mp_encoder.hpp"

namespace spiketrum {

struct RunConfig {
  std::string input;
  std::string output;
  std::string codes_csv;
  std::string report;
  std::string reference;
  std::string bank_path;
  std::string raster_csv;
  std::string kernel_csv;

  std::size_t sps = 16;
  double threshold = 0.0;
  std::optional<CorrelationPath> path;
  std::optional<QFormat> fixed;
  AerFormat aer_format = AerFormat::kBinary;
  std::optional<std::size_t> length;
  unsigned threads = 0;

  BankConfig bank;  // used when bank_path is empty

  double sweep_seconds = 5.0;
  double sweep_amplitude = 0.5;
  std::size_t bench_segments = 8;

  // Fixed mode forces the direct path; an explicit FFT path with fixed mode
  // is rejected.
  EncoderConfig encoder_config() const;
};

int cmd_encode(const RunConfig& config, std::ostream& out);
int cmd_decode(const RunConfig& config, std::ostream& out);
int cmd_kernels(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_bench(const RunConfig& config, std::ostream& out);

// Parses argv-style arguments (without the program name), runs the chosen
// command and returns its exit code. Failures print a single line starting
// with "error:" to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// Exponential sine sweep from f0 to f1 Hz over `seconds`.
std::vector<double> synthesize_log_sweep(double f0, double f1, double seconds,
                                         double amplitude, double sample_rate);

struct SweepResult {
  std::vector<Code> codes;
  std::vector<SpikeEvent> spikes;
  // Per segment: start time in seconds and the first selected kernel.
  std::vector<double> segment_times;
  std::vector<double> winning_kernels;
  double rank_correlation = 0.0;
};

SweepResult run_sweep(const KernelBank& bank, const EncoderConfig& config,
                      double seconds, double amplitude);

struct BenchResult {
  CorrelationPath path = CorrelationPath::kFft;
  std::size_t segments = 0;
  double seconds = 0.0;
  double segments_per_second = 0.0;
  bool realtime = false;
};

// Encodes `segments` segments of deterministic noise and times it.
BenchResult run_bench(const KernelBank& bank, const EncoderConfig& config,
                      std::size_t segments);

}  // namespace spiketrum

#endif  // SPIKETRUM_COMMANDS_HPP_
