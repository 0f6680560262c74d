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

#ifndef SPIKETRUM_ERRORS_HPP_
#define SPIKETRUM_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spiketrum {

// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed file contents. `offset` is the byte position where parsing
// failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::uint64_t offset)
      : std::runtime_error(message + " (at byte offset " +
                           std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Filesystem failures (open, short write).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spiketrum

#endif  // SPIKETRUM_ERRORS_HPP_
