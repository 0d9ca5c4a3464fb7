// Copyright 2026 The zolab Authors.
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

#ifndef ZOLAB_ERRORS_H_
#define ZOLAB_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zolab {

// Invalid model, optimizer, or run configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller violated an operation's precondition (empty batch, length
// mismatch, non-positive step size).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A loss or activation became non-finite. `layer()` names where it was first
// observed ("embedding", "block1", "head", ...).
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string layer, const std::string& what)
      : std::runtime_error(what + " (layer: " + layer + ")"),
        layer_(std::move(layer)) {}

  const std::string& layer() const { return layer_; }

 private:
  std::string layer_;
};

// The allocation ledger refused an acquisition because the simulated device
// budget would be exceeded. Maps to CLI exit code 3.
class SimulatedOomError : public std::runtime_error {
 public:
  SimulatedOomError(uint64_t requested, uint64_t current, uint64_t budget)
      : std::runtime_error("simulated out of memory: requested " +
                           std::to_string(requested) + " bytes with " +
                           std::to_string(current) + " of " +
                           std::to_string(budget) + " bytes in use"),
        requested_(requested),
        current_(current),
        budget_(budget) {}

  uint64_t requested() const { return requested_; }
  uint64_t current() const { return current_; }
  uint64_t budget() const { return budget_; }

 private:
  uint64_t requested_;
  uint64_t current_;
  uint64_t budget_;
};

}  // namespace zolab

#endif  // ZOLAB_ERRORS_H_
