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

#ifndef ZOLAB_BENCH_RUN_CONFIG_H_
#define ZOLAB_BENCH_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/bench/dataset.h"
#include "zolab/deriv_optimizer.h"
#include "zolab/memory_model.h"
#include "zolab/model.h"
#include "zolab/zo_optimizer.h"

namespace zolab::bench {

// Raw dotted-key entries of a config file, e.g. {"model.dim", "64"}.
using ConfigEntries = std::map<std::string, std::string, std::less<>>;

// Every key the run config understands, in canonical order.
const std::vector<std::string_view>& KnownConfigKeys();

// Parses "key = value" lines. '#' starts a comment; blank lines are ignored.
// Unknown keys, duplicate keys and lines without '=' throw ConfigError.
ConfigEntries ParseConfigEntries(std::string_view text);

// Applies "key=value" overrides on top of `entries`; unknown keys throw.
void ApplyOverride(ConfigEntries& entries, std::string_view assignment);

// Tuned on the toy marker-detect task with B = 8 and one probe.
inline constexpr double kToyZoLearningRate = 1e-3;

struct RunConfig {
  std::string preset = "toy";
  ModelConfig model = FindPreset("toy").config;
  uint64_t model_seed = 1;

  OptimizerKind optimizer = OptimizerKind::kMezo;
  ZoConfig zo = {.lr = kToyZoLearningRate};
  SgdConfig sgd;
  AdamConfig adam;

  int64_t batch_size = 8;
  int64_t steps = 10;
  uint64_t train_seed = 1;

  TaskKind task = TaskKind::kMarkerDetect;
  int64_t data_size = 1024;
  uint64_t data_seed = 1;
  std::string data_path;

  std::optional<uint64_t> budget_bytes;
  std::string out_dir;

  // Throws ConfigError.
  void Validate() const;

  // Canonical key/value echo of every setting; ParseRunConfig of its text
  // form reproduces the config.
  ConfigEntries Echo() const;
  std::string ToText() const;
};

// Builds a config from entries (defaults for absent keys). model.preset is
// applied first, then individual model.* keys override it. opt.lr sets the
// learning rate of every optimizer kind and opt.<kind>.lr overrides one kind,
// so a single base config can drive a grid over optimizers. Throws
// ConfigError.
RunConfig BuildRunConfig(const ConfigEntries& entries);
RunConfig ParseRunConfig(std::string_view text);
// Reads a config file; throws ConfigError if it cannot be opened.
ConfigEntries LoadConfigEntries(const std::string& path);

}  // namespace zolab::bench

#endif  // ZOLAB_BENCH_RUN_CONFIG_H_
