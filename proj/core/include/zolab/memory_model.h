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

#ifndef ZOLAB_MEMORY_MODEL_H_
#define ZOLAB_MEMORY_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/ledger.h"
#include "zolab/model.h"

namespace zolab {

enum class OptimizerKind { kMezo, kAdam, kSgd };

std::string_view OptimizerName(OptimizerKind kind);
// Accepts "mezo", "adam", "sgd"; throws ConfigError otherwise.
OptimizerKind ParseOptimizer(std::string_view name);

// Per-token per-layer hidden-state buffers and per-head attention buffers in
// the activation model. Calibrated once against the measured RoBERTa-large
// Adam footprint at batch size 8 and frozen.
inline constexpr double kActivationAlpha = 10.0;
inline constexpr double kActivationBeta = 2.0;

// V d + s d + L (12 d^2 + 13 d) + 2 d + d C + C for the encoder classifier.
uint64_t ParameterCountFormula(const ModelConfig& config);

struct ModelPreset {
  std::string name;
  ModelConfig config;
  uint64_t param_count;
};

// toy, toy-1m, roberta-large (L=24, d=1024, h=16, s=128) and
// opt-1.3b (L=24, d=2048, h=32, s=128).
const std::vector<ModelPreset>& Presets();
// Throws ConfigError for an unknown name.
const ModelPreset& FindPreset(std::string_view name);

enum class Verdict { kFits, kOom };
std::string_view VerdictName(Verdict verdict);

struct FootprintQuery {
  ModelConfig model;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  int64_t batch_size = 1;
  DType dtype = DType::kF32;
  int64_t probes = 1;
  // Concurrent probe workers; values <= 1 mean serial evaluation.
  int64_t parallel_workers = 1;
};

struct MemoryEstimate {
  std::string model_name;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  int64_t batch_size = 1;
  DType dtype = DType::kF32;
  uint64_t param_count = 0;
  CategoryBytes bytes;  // total == sum of categories
  std::optional<uint64_t> budget;
  Verdict verdict = Verdict::kFits;
  int64_t headroom = 0;  // budget - total when a budget is set

  uint64_t static_bytes() const;  // weights + grads + optstate
};

// Bytes per element e from dtype, P parameters, B batch, L layers:
//   weights    e P
//   grads      e P (adam, sgd), 0 (mezo)
//   optstate   2 e P (adam), 0 (sgd, mezo)
//   activation e B L (s d alpha + s^2 h beta) (adam, sgd)
//              e B 2 (s d alpha + s^2 h beta) (mezo, two live layers),
//              times W for W parallel workers
//   transient  W e P for W parallel workers (one replica each), else 0
MemoryEstimate EstimateFootprint(const FootprintQuery& query);
MemoryEstimate EstimateFootprint(std::string_view preset,
                                 OptimizerKind optimizer, int64_t batch_size,
                                 DType dtype, int64_t probes = 1,
                                 int64_t parallel_workers = 1);

struct OomPrediction {
  Verdict verdict;
  int64_t headroom;
};

// Throws PreconditionError unless budget > 0.
OomPrediction PredictOom(const MemoryEstimate& estimate, uint64_t budget);

// Returns a copy with budget, verdict and headroom filled in.
MemoryEstimate WithBudget(MemoryEstimate estimate, uint64_t budget);

// JSON object with the per-category byte counts, total, budget and verdict.
std::string ToJson(const MemoryEstimate& estimate);

}  // namespace zolab

#endif  // ZOLAB_MEMORY_MODEL_H_
