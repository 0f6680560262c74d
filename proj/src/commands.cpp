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

#include "spiketrum/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "spiketrum/decoder_metrics.hpp"
#include "spiketrum/errors.hpp"
#include "spiketrum/wav_io.hpp"

namespace spiketrum {
namespace {

KernelBank resolve_bank(const RunConfig& config) {
  return config.bank_path.empty() ? build_bank(config.bank)
                                  : load_bank(config.bank_path);
}

ChannelMap channel_map_for(const KernelBank& bank) {
  ChannelMap map;
  map.kernel_count = bank.size();
  map.validate();
  return map;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("short write to " + path);
}

std::uint32_t bank_rate(const KernelBank& bank) {
  const double rate = bank.sample_rate();
  if (rate != std::floor(rate) || rate > 4.0e9) {
    throw ParameterError("bank sample rate is not an integer Hz value");
  }
  return static_cast<std::uint32_t>(rate);
}

std::string format_double(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

const char* path_name(CorrelationPath p) {
  return p == CorrelationPath::kFft ? "fft" : "direct";
}

}  // namespace

EncoderConfig RunConfig::encoder_config() const {
  EncoderConfig c;
  c.max_codes_per_segment = sps;
  c.feedback_threshold = threshold;
  c.fixed = fixed;
  c.threads = threads;
  if (fixed) {
    if (path && *path == CorrelationPath::kFft) {
      throw ParameterError("--fixed requires --path direct");
    }
    c.path = CorrelationPath::kDirect;
  } else {
    c.path = path.value_or(CorrelationPath::kFft);
  }
  return c;
}

int cmd_encode(const RunConfig& config, std::ostream& out) {
  if (config.input.empty()) throw ParameterError("encode: no input file");
  if (config.output.empty()) throw ParameterError("encode: -o is required");
  const KernelBank bank = resolve_bank(config);
  const EncoderConfig enc = config.encoder_config();
  const ChannelMap map = channel_map_for(bank);
  const WavData wav = read_wav(config.input, bank_rate(bank));

  const StreamEncoding encoding = encode_stream(wav.samples, bank, enc);
  SpikeTrain train;
  train.spikes = codes_to_spikes(encoding.codes, map, bank.segment_size());
  train.channel_count = static_cast<std::uint32_t>(map.total_channels());
  train.sample_rate = bank.sample_rate();
  save_aer(config.output, train, config.aer_format);

  if (!config.codes_csv.empty()) {
    std::ostringstream csv;
    write_codes_csv(csv, encoding.codes);
    write_text_file(config.codes_csv, csv.str());
  }
  const ReconstructionReport report =
      make_encoding_report(wav.samples, encoding, train.spikes, bank, map);
  if (!config.report.empty()) write_text_file(config.report, report.to_json());

  out << "spikes: " << train.spikes.size() << "\n";
  out << "spikes_per_second: " << format_double(report.spikes_per_second, 3)
      << "\n";
  return 0;
}

int cmd_decode(const RunConfig& config, std::ostream& out) {
  if (config.input.empty()) throw ParameterError("decode: no input file");
  if (config.output.empty()) throw ParameterError("decode: -o is required");
  const KernelBank bank = resolve_bank(config);
  const ChannelMap map = channel_map_for(bank);
  const SpikeTrain train =
      load_aer(config.input, static_cast<std::uint32_t>(map.total_channels()),
               bank.sample_rate());
  if (train.channel_count != map.total_channels()) {
    throw ParameterError("AER file has " +
                         std::to_string(train.channel_count) +
                         " channels but the bank provides " +
                         std::to_string(map.total_channels()));
  }
  if (train.sample_rate != bank.sample_rate()) {
    throw ParameterError("AER sample rate " +
                         format_double(train.sample_rate, 1) +
                         " Hz does not match the bank rate " +
                         format_double(bank.sample_rate(), 1) + " Hz");
  }

  std::optional<WavData> reference;
  if (!config.reference.empty()) {
    reference = read_wav(config.reference, bank_rate(bank));
  }
  std::size_t length = 0;
  if (config.length) {
    length = *config.length;
  } else if (reference) {
    length = reference->samples.size();
  } else if (!train.spikes.empty()) {
    const std::size_t seg = bank.segment_size();
    length = static_cast<std::size_t>(train.spikes.back().time / seg + 1) * seg;
  }

  const std::vector<double> signal =
      reconstruct_from_spikes(train.spikes, bank, map, length);
  write_wav(config.output, signal, bank_rate(bank));

  ReconstructionReport report;
  report.spike_count = train.spikes.size();
  const double seconds = static_cast<double>(length) / bank.sample_rate();
  report.spikes_per_second =
      seconds > 0.0 ? static_cast<double>(train.spikes.size()) / seconds : 0.0;
  report.entropy_bits = spike_entropy(train.spikes, map.total_channels());
  report.sparsity_percent = sparsity_percent(train.spikes, map.total_channels());
  if (reference) {
    std::vector<double> aligned = signal;
    aligned.resize(reference->samples.size(), 0.0);
    double energy = 0.0;
    for (double v : reference->samples) energy += v * v;
    if (energy > 0.0) report.snr_spike_db = snr_db(reference->samples, aligned);
  }
  if (!config.report.empty()) write_text_file(config.report, report.to_json());

  out << "samples: " << length << "\n";
  if (report.snr_spike_db) {
    out << "snr_db: " << format_double(*report.snr_spike_db, 3) << "\n";
  }
  return 0;
}

int cmd_kernels(const RunConfig& config, std::ostream& out) {
  if (config.output.empty()) throw ParameterError("kernels: -o is required");
  const KernelBank bank = build_bank(config.bank);
  save_bank(bank, config.output);
  if (!config.kernel_csv.empty()) {
    std::ostringstream csv;
    csv << "sample";
    for (const Kernel& k : bank.kernels()) csv << ",kernel_" << k.index;
    csv << "\n";
    char buf[64];
    for (std::size_t t = 0; t < bank.kernel_length(); ++t) {
      csv << t;
      for (const Kernel& k : bank.kernels()) {
        std::snprintf(buf, sizeof(buf), ",%.9g", k.samples[t]);
        csv << buf;
      }
      csv << "\n";
    }
    write_text_file(config.kernel_csv, csv.str());
  }
  out << "kernels: " << bank.size() << "\n";
  out << "center_freqs_hz: " << format_double(bank[0].center_freq, 3)
      << " .. " << format_double(bank[bank.size() - 1].center_freq, 3) << "\n";
  return 0;
}

std::vector<double> synthesize_log_sweep(double f0, double f1, double seconds,
                                         double amplitude,
                                         double sample_rate) {
  if (!(f0 > 0.0) || !(f1 > f0) || !(seconds > 0.0) || !(sample_rate > 0.0)) {
    throw ParameterError("invalid sweep parameters");
  }
  const auto count =
      static_cast<std::size_t>(std::llround(seconds * sample_rate));
  const double rate = std::log(f1 / f0) / seconds;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    // Phase integrates f(t) = f0 exp(rate t).
    x[i] = amplitude * std::sin(two_pi * f0 * (std::exp(rate * t) - 1.0) / rate);
  }
  return x;
}

SweepResult run_sweep(const KernelBank& bank, const EncoderConfig& config,
                      double seconds, double amplitude) {
  const std::vector<double> x =
      synthesize_log_sweep(bank.config().fmin, bank.config().fmax, seconds,
                           amplitude, bank.sample_rate());
  StreamEncoding encoding = encode_stream(x, bank, config);
  SweepResult result;
  result.codes = std::move(encoding.codes);
  result.spikes = codes_to_spikes(result.codes, channel_map_for(bank),
                                  bank.segment_size());
  for (const Code& c : result.codes) {
    if (c.iteration != 0) continue;
    result.segment_times.push_back(
        static_cast<double>(c.segment_index * bank.segment_size()) /
        bank.sample_rate());
    result.winning_kernels.push_back(static_cast<double>(c.m));
  }
  result.rank_correlation =
      spearman_rank_correlation(result.segment_times, result.winning_kernels);
  return result;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  if (config.output.empty()) throw ParameterError("sweep: -o is required");
  const KernelBank bank = resolve_bank(config);
  const ChannelMap map = channel_map_for(bank);
  const SweepResult result = run_sweep(bank, config.encoder_config(),
                                       config.sweep_seconds,
                                       config.sweep_amplitude);
  SpikeTrain train;
  train.spikes = result.spikes;
  train.channel_count = static_cast<std::uint32_t>(map.total_channels());
  train.sample_rate = bank.sample_rate();
  save_aer(config.output, train, config.aer_format);
  if (!config.raster_csv.empty()) {
    std::ostringstream csv;
    csv << "segment_time,kernel\n";
    for (std::size_t i = 0; i < result.segment_times.size(); ++i) {
      csv << format_double(result.segment_times[i]) << ','
          << static_cast<std::size_t>(result.winning_kernels[i]) << "\n";
    }
    write_text_file(config.raster_csv, csv.str());
  }
  out << "segments: " << result.segment_times.size() << "\n";
  out << "spikes: " << result.spikes.size() << "\n";
  out << "rank_correlation: " << format_double(result.rank_correlation, 4)
      << "\n";
  return 0;
}

BenchResult run_bench(const KernelBank& bank, const EncoderConfig& config,
                      std::size_t segments) {
  if (segments == 0) throw ParameterError("no input: bench corpus is empty");
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  std::vector<double> x(segments * bank.segment_size());
  for (double& v : x) v = noise(rng);

  const auto start = std::chrono::steady_clock::now();
  const StreamEncoding encoding = encode_stream(x, bank, config);
  const auto stop = std::chrono::steady_clock::now();

  BenchResult r;
  r.path = config.path;
  r.segments = encoding.segment_count;
  r.seconds = std::chrono::duration<double>(stop - start).count();
  r.segments_per_second =
      r.seconds > 0.0 ? static_cast<double>(r.segments) / r.seconds : 0.0;
  const double needed =
      bank.sample_rate() / static_cast<double>(bank.segment_size());
  r.realtime = r.segments_per_second >= needed;
  return r;
}

int cmd_bench(const RunConfig& config, std::ostream& out) {
  const KernelBank bank = resolve_bank(config);
  std::vector<CorrelationPath> paths;
  if (config.path || config.fixed) {
    paths.push_back(config.encoder_config().path);
  } else {
    paths = {CorrelationPath::kDirect, CorrelationPath::kFft};
  }
  for (CorrelationPath p : paths) {
    RunConfig run = config;
    run.path = p;
    const BenchResult r =
        run_bench(bank, run.encoder_config(), config.bench_segments);
    out << "path=" << path_name(p) << " sps=" << config.sps
        << " segments=" << r.segments
        << " segments_per_second=" << format_double(r.segments_per_second, 2)
        << " realtime_threshold="
        << format_double(bank.sample_rate() / bank.segment_size(), 2)
        << " realtime=" << (r.realtime ? "yes" : "no") << "\n";
  }
  return 0;
}

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("SPIKETRUM_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') {
    throw ParameterError("SPIKETRUM_THREADS must be a non-negative integer");
  }
  return static_cast<unsigned>(v);
}

void add_encoder_options(CLI::App* cmd, RunConfig& c, std::string& path,
                         std::string& fixed) {
  cmd->add_option("--sps", c.sps, "Spikes (codes) per segment");
  cmd->add_option("--threshold", c.threshold,
                  "Feedback stop threshold on |s| (0 disables)");
  cmd->add_option("--path", path, "Correlation path")
      ->check(CLI::IsMember({"direct", "fft"}));
  cmd->add_option("--fixed", fixed, "Fixed-point mode, e.g. Q5.28");
}

void add_bank_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--bank", c.bank_path, "Kernel bank file (.spkb)");
}

void add_aer_format_option(CLI::App* cmd, std::string& format) {
  cmd->add_option("--aer-format", format, "AER output format")
      ->check(CLI::IsMember({"binary", "text"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Matching-pursuit spike encoder for audio", "spiketrum"};
  app.require_subcommand(1);

  RunConfig c;
  std::string path;
  std::string fixed;
  std::string aer_format = "binary";
  std::size_t length = 0;

  auto* encode = app.add_subcommand("encode", "Encode a WAV file into spikes");
  encode->add_option("input", c.input, "16-bit PCM mono WAV")->required();
  encode->add_option("-o,--output", c.output, "AER output file")->required();
  encode->add_option("--codes", c.codes_csv, "Optional code CSV output");
  encode->add_option("--report", c.report, "Optional report JSON");
  add_encoder_options(encode, c, path, fixed);
  add_bank_options(encode, c);
  add_aer_format_option(encode, aer_format);

  auto* decode = app.add_subcommand("decode", "Reconstruct a WAV from spikes");
  decode->add_option("input", c.input, "AER file (binary or text)")
      ->required();
  decode->add_option("-o,--output", c.output, "WAV output file")->required();
  decode->add_option("--reference", c.reference, "Original WAV for SNR");
  decode->add_option("--report", c.report, "Optional report JSON");
  auto* length_opt =
      decode->add_option("--length", length, "Output length in samples");
  add_bank_options(decode, c);

  auto* kernels = app.add_subcommand("kernels", "Build and save a kernel bank");
  kernels->add_option("-o,--output", c.output, "Bank file")->required();
  kernels->add_option("--csv", c.kernel_csv, "Optional kernel waveform CSV");
  kernels->add_option("--count", c.bank.kernel_count, "Number of kernels");
  kernels->add_option("--fmin", c.bank.fmin, "Lowest center frequency (Hz)");
  kernels->add_option("--fmax", c.bank.fmax, "Highest center frequency (Hz)");
  kernels->add_option("--order", c.bank.order, "Gammatone order");

  auto* sweep = app.add_subcommand("sweep", "Encode a logarithmic sine sweep");
  sweep->add_option("-o,--output", c.output, "AER output file")->required();
  sweep->add_option("--raster", c.raster_csv,
                    "CSV of (segment_time, winning kernel)");
  sweep->add_option("--duration", c.sweep_seconds, "Sweep length (s)");
  sweep->add_option("--amplitude", c.sweep_amplitude,
                    "Sweep amplitude (full scale = 1)");
  add_encoder_options(sweep, c, path, fixed);
  add_bank_options(sweep, c);
  add_aer_format_option(sweep, aer_format);

  auto* bench = app.add_subcommand("bench", "Measure encoding throughput");
  bench->add_option("--segments", c.bench_segments,
                    "Number of synthetic segments");
  add_encoder_options(bench, c, path, fixed);
  add_bank_options(bench, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    // Sweep characterizes one code per segment unless told otherwise.
    if (sweep->parsed() && sweep->count("--sps") == 0) c.sps = 1;
    if (!path.empty()) {
      c.path = path == "fft" ? CorrelationPath::kFft : CorrelationPath::kDirect;
    }
    if (!fixed.empty()) c.fixed = QFormat::parse(fixed);
    c.aer_format = aer_format == "text" ? AerFormat::kText : AerFormat::kBinary;
    if (length_opt->count() > 0) c.length = length;
    c.threads = threads_from_env();

    if (encode->parsed()) return cmd_encode(c, out);
    if (decode->parsed()) return cmd_decode(c, out);
    if (kernels->parsed()) return cmd_kernels(c, out);
    if (sweep->parsed()) return cmd_sweep(c, out);
    if (bench->parsed()) return cmd_bench(c, out);
  } catch (const std::exception& e) {
    std::string message = e.what();
    for (char& ch : message) {
      if (ch == '\n') ch = ' ';
    }
    err << "error: " << message << "\n";
    return 1;
  }
  return 1;
}

}  // namespace spiketrum
