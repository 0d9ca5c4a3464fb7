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

#include "zolab/memory_model.h"

#include <string>

#include "json.hpp"
#include "zolab/errors.h"

namespace zolab {

std::string_view OptimizerName(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kMezo:
      return "mezo";
    case OptimizerKind::kAdam:
      return "adam";
    case OptimizerKind::kSgd:
      return "sgd";
  }
  return "unknown";
}

OptimizerKind ParseOptimizer(std::string_view name) {
  if (name == "mezo") return OptimizerKind::kMezo;
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

std::string_view VerdictName(Verdict verdict) {
  return verdict == Verdict::kOom ? "oom" : "fits";
}

uint64_t ParameterCountFormula(const ModelConfig& c) {
  const uint64_t v = c.vocab_size;
  const uint64_t d = c.dim;
  const uint64_t s = c.seq_len;
  const uint64_t l = c.layers;
  const uint64_t k = c.classes;
  return v * d + s * d + l * (12 * d * d + 13 * d) + 2 * d + d * k + k;
}

namespace {

ModelPreset MakePreset(std::string name, int64_t vocab, int64_t dim,
                       int64_t layers, int64_t heads, int64_t seq_len) {
  ModelConfig config;
  config.vocab_size = vocab;
  config.dim = dim;
  config.layers = layers;
  config.heads = heads;
  config.seq_len = seq_len;
  config.classes = 2;
  config.dtype = DType::kF32;
  return ModelPreset{std::move(name), config, ParameterCountFormula(config)};
}

}  // namespace

const std::vector<ModelPreset>& Presets() {
  static const std::vector<ModelPreset> presets = {
      MakePreset("toy", 1000, 64, 2, 4, 32),
      MakePreset("toy-1m", 1000, 128, 4, 4, 32),
      MakePreset("roberta-large", 50265, 1024, 24, 16, 128),
      MakePreset("opt-1.3b", 50272, 2048, 24, 32, 128),
  };
  return presets;
}

const ModelPreset& FindPreset(std::string_view name) {
  for (const ModelPreset& preset : Presets()) {
    if (preset.name == name) return preset;
  }
  throw ConfigError("unknown model preset '" + std::string(name) + "'");
}

uint64_t MemoryEstimate::static_bytes() const {
  return bytes[Category::kWeights] + bytes[Category::kGrads] +
         bytes[Category::kOptState];
}

MemoryEstimate EstimateFootprint(const FootprintQuery& query) {
  const ModelConfig& m = query.model;
  if (query.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (query.probes < 1) throw ConfigError("probes must be >= 1");
  const uint64_t e = BytesPerElement(query.dtype);
  const uint64_t p = ParameterCountFormula(m);
  const uint64_t b = query.batch_size;
  const uint64_t workers =
      query.parallel_workers > 1 ? query.parallel_workers : 1;
  const double per_layer =
      static_cast<double>(m.seq_len * m.dim) * kActivationAlpha +
      static_cast<double>(m.seq_len * m.seq_len * m.heads) * kActivationBeta;

  MemoryEstimate out;
  out.optimizer = query.optimizer;
  out.batch_size = query.batch_size;
  out.dtype = query.dtype;
  out.param_count = p;
  out.bytes[Category::kWeights] = e * p;
  switch (query.optimizer) {
    case OptimizerKind::kAdam:
    case OptimizerKind::kSgd:
      out.bytes[Category::kGrads] = e * p;
      out.bytes[Category::kOptState] =
          query.optimizer == OptimizerKind::kAdam ? 2 * e * p : 0;
      out.bytes[Category::kActivation] = static_cast<uint64_t>(
          static_cast<double>(e * b * m.layers) * per_layer);
      break;
    case OptimizerKind::kMezo:
      out.bytes[Category::kActivation] = static_cast<uint64_t>(
          static_cast<double>(e * b * 2 * workers) * per_layer);
      out.bytes[Category::kTransient] = workers > 1 ? workers * e * p : 0;
      break;
  }
  uint64_t total = 0;
  for (Category c : kAllCategories) total += out.bytes[c];
  out.bytes.total = total;
  return out;
}

MemoryEstimate EstimateFootprint(std::string_view preset,
                                 OptimizerKind optimizer, int64_t batch_size,
                                 DType dtype, int64_t probes,
                                 int64_t parallel_workers) {
  const ModelPreset& p = FindPreset(preset);
  MemoryEstimate out = EstimateFootprint(FootprintQuery{
      p.config, optimizer, batch_size, dtype, probes, parallel_workers});
  out.model_name = p.name;
  return out;
}

OomPrediction PredictOom(const MemoryEstimate& estimate, uint64_t budget) {
  if (budget == 0) throw PreconditionError("budget must be > 0");
  const int64_t headroom =
      static_cast<int64_t>(budget) - static_cast<int64_t>(estimate.bytes.total);
  return {estimate.bytes.total > budget ? Verdict::kOom : Verdict::kFits,
          headroom};
}

MemoryEstimate WithBudget(MemoryEstimate estimate, uint64_t budget) {
  const OomPrediction prediction = PredictOom(estimate, budget);
  estimate.budget = budget;
  estimate.verdict = prediction.verdict;
  estimate.headroom = prediction.headroom;
  return estimate;
}

std::string ToJson(const MemoryEstimate& estimate) {
  nlohmann::ordered_json j;
  j["model"] = estimate.model_name;
  j["optimizer"] = OptimizerName(estimate.optimizer);
  j["batch_size"] = estimate.batch_size;
  j["dtype"] = DTypeName(estimate.dtype);
  j["param_count"] = estimate.param_count;
  nlohmann::ordered_json bytes;
  for (Category c : kAllCategories) {
    bytes[std::string(CategoryName(c))] = estimate.bytes[c];
  }
  bytes["total"] = estimate.bytes.total;
  j["bytes"] = bytes;
  if (estimate.budget) {
    j["budget"] = *estimate.budget;
    j["headroom"] = estimate.headroom;
  } else {
    j["budget"] = nullptr;
    j["headroom"] = nullptr;
  }
  j["verdict"] = VerdictName(estimate.verdict);
  return j.dump(2);
}

}  // namespace zolab
