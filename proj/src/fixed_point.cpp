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

#include "spiketrum/fixed_point.hpp"

#include <charconv>
#include <cmath>

#include "spiketrum/errors.hpp"

namespace spiketrum {

QFormat QFormat::parse(std::string_view text) {
  const std::string original(text);
  if (text.empty() || (text.front() != 'Q' && text.front() != 'q')) {
    throw ParameterError("fixed-point format must look like Q5.28, got \"" +
                         original + "\"");
  }
  text.remove_prefix(1);
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    throw ParameterError("fixed-point format missing '.': \"" + original +
                         "\"");
  }
  QFormat f;
  auto parse_int = [&](std::string_view part, int* out) {
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), *out);
    if (ec != std::errc() || ptr != part.data() + part.size() ||
        part.empty()) {
      throw ParameterError("bad fixed-point format \"" + original + "\"");
    }
  };
  parse_int(text.substr(0, dot), &f.int_bits);
  parse_int(text.substr(dot + 1), &f.frac_bits);
  f.validate();
  return f;
}

std::string QFormat::to_string() const {
  return "Q" + std::to_string(int_bits) + "." + std::to_string(frac_bits);
}

void QFormat::validate() const {
  if (int_bits < 0 || frac_bits < 1 ||
      1 + int_bits + frac_bits != kFixedWordBits) {
    throw ParameterError("fixed-point format " + to_string() +
                         " must satisfy 1 + I + F = 34 with F >= 1");
  }
}

double QFormat::scale() const { return std::ldexp(1.0, frac_bits); }

namespace fixed {

Wide round_shift_rne(Wide value, int shift) {
  if (shift <= 0) return value;
  const Wide one = 1;
  const Wide q = value >> shift;  // arithmetic: floor division
  const Wide rem = value - (q << shift);
  const Wide half = one << (shift - 1);
  if (rem > half || (rem == half && (q & 1) != 0)) return q + 1;
  return q;
}

std::int64_t saturate(Wide value, bool* saturated) {
  constexpr Wide kMax = (Wide{1} << 33) - 1;
  constexpr Wide kMin = -(Wide{1} << 33);
  if (value > kMax) {
    if (saturated) *saturated = true;
    return static_cast<std::int64_t>(kMax);
  }
  if (value < kMin) {
    if (saturated) *saturated = true;
    return static_cast<std::int64_t>(kMin);
  }
  return static_cast<std::int64_t>(value);
}

}  // namespace fixed

namespace {

void require_same_format(const Q34& a, const Q34& b) {
  if (!(a.format == b.format)) {
    throw ParameterError("fixed-point operands have different formats: " +
                         a.format.to_string() + " vs " + b.format.to_string());
  }
}

Q34 make(fixed::Wide value, QFormat format, bool carried) {
  Q34 q;
  q.format = format;
  q.saturated = carried;
  q.raw = fixed::saturate(value, &q.saturated);
  return q;
}

}  // namespace

Q34 to_fixed(double x, QFormat format) {
  format.validate();
  Q34 q;
  q.format = format;
  if (std::isnan(x)) {
    q.saturated = true;
    return q;
  }
  // Scaling by a power of two is exact; nearbyint rounds ties to even under
  // the default rounding mode.
  const double scaled = std::nearbyint(std::ldexp(x, format.frac_bits));
  if (scaled >= static_cast<double>(format.max_raw())) {
    q.raw = format.max_raw();
    q.saturated = scaled > static_cast<double>(format.max_raw());
    return q;
  }
  if (scaled <= static_cast<double>(format.min_raw())) {
    q.raw = format.min_raw();
    q.saturated = scaled < static_cast<double>(format.min_raw());
    return q;
  }
  q.raw = static_cast<std::int64_t>(scaled);
  return q;
}

double to_float(const Q34& q) {
  return std::ldexp(static_cast<double>(q.raw), -q.format.frac_bits);
}

Q34 q_add(const Q34& a, const Q34& b) {
  require_same_format(a, b);
  return make(fixed::Wide{a.raw} + b.raw, a.format,
              a.saturated || b.saturated);
}

Q34 q_sub(const Q34& a, const Q34& b) {
  require_same_format(a, b);
  return make(fixed::Wide{a.raw} - b.raw, a.format,
              a.saturated || b.saturated);
}

Q34 q_mul(const Q34& a, const Q34& b) {
  require_same_format(a, b);
  const fixed::Wide product = fixed::Wide{a.raw} * b.raw;
  return make(fixed::round_shift_rne(product, a.format.frac_bits), a.format,
              a.saturated || b.saturated);
}

}  // namespace spiketrum
