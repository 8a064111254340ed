// core/include/teca/errors.h

// Copyright 2026 The teca authors

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

#ifndef TECA_ERRORS_H_
#define TECA_ERRORS_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace teca {

// Bad flags / malformed requests. Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable files, malformed inputs, contract violations on data.
// Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite losses, NaN gradients, failed numerical preconditions.
// Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace teca

// Precondition check used across the library; failures carry the failing
// expression and the caller's message.
#define TECA_CHECK(cond, msg)                                       \
  do {                                                              \
    if (!(cond)) {                                                  \
      std::ostringstream teca_check_os_;                            \
      teca_check_os_ << msg;                                        \
      throw ::teca::DataError(teca_check_os_.str());                \
    }                                                               \
  } while (0)

#endif  // TECA_ERRORS_H_
