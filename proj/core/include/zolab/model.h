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

#ifndef ZOLAB_MODEL_H_
#define ZOLAB_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/ledger.h"

namespace zolab {

// f16 exists only for byte accounting; models execute in f32 or f64.
enum class DType { kF16, kF32, kF64 };

size_t BytesPerElement(DType dtype);
std::string_view DTypeName(DType dtype);
// Throws ConfigError for anything but "f16", "f32", "f64".
DType ParseDType(std::string_view name);

template <typename T>
constexpr DType DTypeOf();
template <>
constexpr DType DTypeOf<float>() {
  return DType::kF32;
}
template <>
constexpr DType DTypeOf<double>() {
  return DType::kF64;
}

// Pre-norm transformer encoder classifier:
//   token + position embedding
//   -> layers x [LN, multi-head self-attention, residual, LN, 4x GELU MLP,
//      residual]
//   -> final LN -> mean pool over positions -> linear head.
struct ModelConfig {
  int64_t vocab_size = 1000;
  int64_t dim = 64;
  int64_t layers = 2;
  int64_t heads = 4;
  int64_t seq_len = 32;
  int64_t classes = 2;
  DType dtype = DType::kF32;

  int64_t head_dim() const { return dim / heads; }
  int64_t mlp_dim() const { return 4 * dim; }

  // Throws ConfigError describing the first violated invariant.
  void Validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TensorSlot {
  std::string name;
  size_t offset = 0;
  std::vector<size_t> shape;

  size_t size() const;
};

// Offsets of one encoder block's tensors inside the flat parameter vector.
// Linear weights are stored [in, out] row-major.
struct BlockOffsets {
  size_t ln1_gain, ln1_bias;
  size_t wq, bq, wk, bk, wv, bv, wo, bo;
  size_t ln2_gain, ln2_bias;
  size_t w1, b1, w2, b2;
};

// Fixed map from tensor names to ranges of the flat parameter vector. A pure
// function of the config.
class ModelLayout {
 public:
  explicit ModelLayout(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  size_t param_count() const { return param_count_; }
  const std::vector<TensorSlot>& slots() const { return slots_; }

  size_t tok_emb() const { return tok_emb_; }
  size_t pos_emb() const { return pos_emb_; }
  const BlockOffsets& block(size_t layer) const { return blocks_[layer]; }
  size_t final_gain() const { return final_gain_; }
  size_t final_bias() const { return final_bias_; }
  size_t head_w() const { return head_w_; }
  size_t head_b() const { return head_b_; }

  const TensorSlot* Find(std::string_view name) const;

 private:
  size_t Add(std::string name, std::vector<size_t> shape);

  ModelConfig config_;
  std::vector<TensorSlot> slots_;
  size_t param_count_ = 0;
  size_t tok_emb_ = 0;
  size_t pos_emb_ = 0;
  std::vector<BlockOffsets> blocks_;
  size_t final_gain_ = 0;
  size_t final_bias_ = 0;
  size_t head_w_ = 0;
  size_t head_b_ = 0;
};

// Flat model parameters plus their layout; the object the optimizers perturb
// and update in place. Bytes are charged to a ledger (kWeights by default).
template <typename T>
class ParameterVector {
 public:
  ParameterVector(std::shared_ptr<const ModelLayout> layout,
                  AllocationLedger& ledger,
                  Category category = Category::kWeights)
      : layout_(std::move(layout)),
        values_(ledger, category, layout_->param_count()) {}

  ParameterVector(ParameterVector&&) noexcept = default;
  ParameterVector& operator=(ParameterVector&&) noexcept = default;

  ParameterVector Clone(Category category) const {
    return ParameterVector(layout_, values_.Clone(category));
  }

  const ModelLayout& layout() const { return *layout_; }
  std::shared_ptr<const ModelLayout> shared_layout() const { return layout_; }
  const ModelConfig& config() const { return layout_->config(); }
  size_t param_count() const { return values_.size(); }

  std::span<T> values() { return values_.span(); }
  std::span<const T> values() const { return values_.span(); }

 private:
  ParameterVector(std::shared_ptr<const ModelLayout> layout,
                  TrackedBuffer<T> values)
      : layout_(std::move(layout)), values_(std::move(values)) {}

  std::shared_ptr<const ModelLayout> layout_;
  TrackedBuffer<T> values_;
};

// Token ids [batch_size x seq_len] row-major and one label per row.
struct Batch {
  int64_t batch_size = 0;
  int64_t seq_len = 0;
  std::vector<int32_t> tokens;
  std::vector<int32_t> labels;
};

// Throws PreconditionError for an empty batch, ConfigError for shape or
// range mismatches against `config`.
void ValidateBatch(const ModelConfig& config, const Batch& batch);

// N(0, 0.02^2) for embeddings and linear weights, gains 1, biases 0.
// Deterministic in (config, seed). T must match config.dtype.
template <typename T>
ParameterVector<T> InitModel(const ModelConfig& config, uint64_t seed,
                             AllocationLedger& ledger);

extern template ParameterVector<float> InitModel<float>(const ModelConfig&,
                                                        uint64_t,
                                                        AllocationLedger&);
extern template ParameterVector<double> InitModel<double>(const ModelConfig&,
                                                          uint64_t,
                                                          AllocationLedger&);

}  // namespace zolab

#endif  // ZOLAB_MODEL_H_
