// Copyright 2026 The Clockforge Authors.
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

#ifndef CLOCKFORGE_ERRORS_H_
#define CLOCKFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace clockforge {

// Malformed arguments: dimension mismatches, out-of-range bundles, missing
// prices, truncated traces.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact winner determination refused because the instance exceeds the
// configured item cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bidder emitted something that is not an integer point of the
// consumption set.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model construction with parameters the model cannot honor.
class InvalidConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called on input that violates its precondition, e.g.
// recovering a valuation from a history that fails GARP.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace clockforge

#endif  // CLOCKFORGE_ERRORS_H_
