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

// 34-bit two's-complement fixed-point arithmetic with round-to-nearest-even
// and saturation, modelling the encoder's hardware datapath.

#ifndef SPIKETRUM_FIXED_POINT_HPP_
#define SPIKETRUM_FIXED_POINT_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace spiketrum {

inline constexpr int kFixedWordBits = 34;

// Q<I>.<F> with one sign bit: 1 + I + F == 34.
struct QFormat {
  int int_bits = 5;
  int frac_bits = 28;

  // Parses "Q5.28"; throws ParameterError on syntax or width mismatch.
  static QFormat parse(std::string_view text);
  std::string to_string() const;
  void validate() const;

  std::int64_t max_raw() const { return (std::int64_t{1} << 33) - 1; }
  std::int64_t min_raw() const { return -(std::int64_t{1} << 33); }
  double scale() const;  // 2^frac_bits

  friend bool operator==(const QFormat&, const QFormat&) = default;
};

struct Q34 {
  std::int64_t raw = 0;
  QFormat format;
  // Set when this value (or an operand it was computed from) saturated.
  bool saturated = false;

  friend bool operator==(const Q34& a, const Q34& b) {
    return a.raw == b.raw && a.format == b.format;
  }
};

// Round-to-nearest-even onto the F-bit grid, saturating at the format
// bounds. NaN maps to 0 with the saturation flag set.
Q34 to_fixed(double x, QFormat format = {});
double to_float(const Q34& q);

// Exact sums and products, rounded once to F fractional bits (RNE), then
// saturated. Operands must share a format.
Q34 q_add(const Q34& a, const Q34& b);
Q34 q_sub(const Q34& a, const Q34& b);
Q34 q_mul(const Q34& a, const Q34& b);

namespace fixed {

using Wide = __int128;

// floor(value / 2^shift) rounded to nearest, ties to even.
Wide round_shift_rne(Wide value, int shift);

// Clamps to the 34-bit range; sets *saturated when clamping occurred.
std::int64_t saturate(Wide value, bool* saturated);

}  // namespace fixed

}  // namespace spiketrum

#endif  // SPIKETRUM_FIXED_POINT_HPP_
