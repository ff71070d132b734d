// Copyright (c) the qpeg project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpeg {

/// Invalid argument or violated precondition (bad coordinates, digit out of
/// range, mismatched dimensions, chi out of its ceiling, ...).
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed serialized data (PGM or container). Carries the byte offset at
/// which parsing failed when it is known.
class format_error : public std::runtime_error {
 public:
  static constexpr std::size_t no_offset = static_cast<std::size_t>(-1);

  explicit format_error(const std::string& what, std::size_t offset = no_offset)
      : std::runtime_error(offset == no_offset
                               ? what
                               : what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A request whose result would exceed a configured memory cap.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unencodable input (non-finite tensor entries, quantizer overflow).
class encode_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpeg
