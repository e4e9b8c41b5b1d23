// Copyright 2026 The eqtrack Authors.
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

#ifndef EQTRACK_ERRORS_HPP_
#define EQTRACK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace eqtrack {

// Invalid caller input: out-of-range indices, malformed shapes, bad parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver could not finish (cycling guard, iteration cap).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Schema violation in a JSON document. `path` is a JSON pointer to the
// offending element ("/learners/0/kind").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)), message_(message) {}

  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

}  // namespace eqtrack

#endif  // EQTRACK_ERRORS_HPP_
