// Copyright 2026 The kdcs Authors
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

namespace kdcs {

// Base for every error the engine reports. Callers that only care about
// "engine said no" catch this; the subclasses let tools map to exit codes
// and HTTP statuses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (unnormalized coordinate, k > n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated file. `offset` is the byte (or line, for text
// inputs) position where decoding stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// No admissible percentage <= 1 suppresses the selected region.
class CannotSuppressError : public Error {
 public:
  using Error::Error;
};

}  // namespace kdcs
