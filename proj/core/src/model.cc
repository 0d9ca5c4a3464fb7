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

#include "zolab/model.h"

#include <algorithm>
#include <string>

#include "zolab/errors.h"
#include "zolab/rng.h"

namespace zolab {

size_t BytesPerElement(DType dtype) {
  switch (dtype) {
    case DType::kF16:
      return 2;
    case DType::kF32:
      return 4;
    case DType::kF64:
      return 8;
  }
  return 0;
}

std::string_view DTypeName(DType dtype) {
  switch (dtype) {
    case DType::kF16:
      return "f16";
    case DType::kF32:
      return "f32";
    case DType::kF64:
      return "f64";
  }
  return "unknown";
}

DType ParseDType(std::string_view name) {
  if (name == "f16") return DType::kF16;
  if (name == "f32") return DType::kF32;
  if (name == "f64") return DType::kF64;
  throw ConfigError("unknown dtype '" + std::string(name) + "'");
}

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError("invalid model config: " + message);
  };
  require(vocab_size >= 1 && dim >= 1 && layers >= 1 && heads >= 1 &&
              seq_len >= 1 && classes >= 1,
          "all counts must be >= 1");
  require(dim % heads == 0, "dim " + std::to_string(dim) +
                                " is not divisible by heads " +
                                std::to_string(heads));
  require(classes >= 2, "classes must be >= 2");
  require(vocab_size >= classes, "vocab_size must be >= classes");
  require(dtype != DType::kF16, "f16 is not an execution dtype");
}

size_t TensorSlot::size() const {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

ModelLayout::ModelLayout(const ModelConfig& config) : config_(config) {
  config_.Validate();
  const size_t v = config.vocab_size;
  const size_t d = config.dim;
  const size_t s = config.seq_len;
  const size_t f = config.mlp_dim();
  const size_t c = config.classes;

  tok_emb_ = Add("tok_emb", {v, d});
  pos_emb_ = Add("pos_emb", {s, d});
  for (int64_t l = 0; l < config.layers; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    BlockOffsets b{};
    b.ln1_gain = Add(p + "ln1.gain", {d});
    b.ln1_bias = Add(p + "ln1.bias", {d});
    b.wq = Add(p + "attn.wq", {d, d});
    b.bq = Add(p + "attn.bq", {d});
    b.wk = Add(p + "attn.wk", {d, d});
    b.bk = Add(p + "attn.bk", {d});
    b.wv = Add(p + "attn.wv", {d, d});
    b.bv = Add(p + "attn.bv", {d});
    b.wo = Add(p + "attn.wo", {d, d});
    b.bo = Add(p + "attn.bo", {d});
    b.ln2_gain = Add(p + "ln2.gain", {d});
    b.ln2_bias = Add(p + "ln2.bias", {d});
    b.w1 = Add(p + "mlp.w1", {d, f});
    b.b1 = Add(p + "mlp.b1", {f});
    b.w2 = Add(p + "mlp.w2", {f, d});
    b.b2 = Add(p + "mlp.b2", {d});
    blocks_.push_back(b);
  }
  final_gain_ = Add("final_ln.gain", {d});
  final_bias_ = Add("final_ln.bias", {d});
  head_w_ = Add("head.w", {d, c});
  head_b_ = Add("head.b", {c});
}

size_t ModelLayout::Add(std::string name, std::vector<size_t> shape) {
  TensorSlot slot{std::move(name), param_count_, std::move(shape)};
  param_count_ += slot.size();
  slots_.push_back(std::move(slot));
  return slots_.back().offset;
}

const TensorSlot* ModelLayout::Find(std::string_view name) const {
  for (const TensorSlot& slot : slots_) {
    if (slot.name == name) return &slot;
  }
  return nullptr;
}

void ValidateBatch(const ModelConfig& config, const Batch& batch) {
  if (batch.batch_size <= 0) {
    throw PreconditionError("batch must contain at least one sample");
  }
  if (batch.seq_len != config.seq_len) {
    throw ConfigError("batch seq_len " + std::to_string(batch.seq_len) +
                      " does not match model seq_len " +
                      std::to_string(config.seq_len));
  }
  if (batch.tokens.size() !=
          static_cast<size_t>(batch.batch_size * batch.seq_len) ||
      batch.labels.size() != static_cast<size_t>(batch.batch_size)) {
    throw ConfigError("batch arrays do not match batch_size x seq_len");
  }
  for (int32_t t : batch.tokens) {
    if (t < 0 || t >= config.vocab_size) {
      throw ConfigError("token id " + std::to_string(t) + " out of range");
    }
  }
  for (int32_t y : batch.labels) {
    if (y < 0 || y >= config.classes) {
      throw ConfigError("label " + std::to_string(y) + " out of range");
    }
  }
}

template <typename T>
ParameterVector<T> InitModel(const ModelConfig& config, uint64_t seed,
                             AllocationLedger& ledger) {
  config.Validate();
  if (config.dtype != DTypeOf<T>()) {
    throw ConfigError("model dtype " + std::string(DTypeName(config.dtype)) +
                      " does not match the requested scalar type");
  }
  auto layout = std::make_shared<const ModelLayout>(config);
  ParameterVector<T> params(layout, ledger);
  std::span<T> values = params.values();
  const uint64_t stream = Mix64(seed ^ 0x5EED1A11ULL);
  for (const TensorSlot& slot : layout->slots()) {
    std::span<T> tensor = values.subspan(slot.offset, slot.size());
    const std::string& name = slot.name;
    const bool is_gain = name.ends_with(".gain");
    const bool is_bias = name.ends_with(".bias") || name.ends_with(".bq") ||
                         name.ends_with(".bk") || name.ends_with(".bv") ||
                         name.ends_with(".bo") || name.ends_with(".b1") ||
                         name.ends_with(".b2") || name == "head.b";
    if (is_gain) {
      std::fill(tensor.begin(), tensor.end(), T(1));
    } else if (is_bias) {
      std::fill(tensor.begin(), tensor.end(), T(0));
    } else {
      NormalStreamFill(stream, slot.offset, tensor);
      for (T& x : tensor) x *= T(0.02);
    }
  }
  return params;
}

template ParameterVector<float> InitModel<float>(const ModelConfig&, uint64_t,
                                                 AllocationLedger&);
template ParameterVector<double> InitModel<double>(const ModelConfig&,
                                                   uint64_t,
                                                   AllocationLedger&);

}  // namespace zolab
