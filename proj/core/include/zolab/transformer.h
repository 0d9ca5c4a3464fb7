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

#ifndef ZOLAB_TRANSFORMER_H_
#define ZOLAB_TRANSFORMER_H_

#include <cstdint>
#include <span>

#include "zolab/ledger.h"
#include "zolab/model.h"

namespace zolab {

// Mean cross-entropy of the classifier over `batch`.
//
// Evaluation streams one sample at a time through the network, reusing a
// single block-sized scratch arena and the sample's residual stream, so the
// activation working set does not grow with batch size or depth. Every
// buffer is charged to `ledger` as kActivation and released before return.
// Throws NumericError naming the first layer whose output is non-finite.
template <typename T>
double ForwardLoss(const ModelLayout& layout, std::span<const T> params,
                   const Batch& batch, AllocationLedger& ledger);

template <typename T>
double ForwardLoss(const ParameterVector<T>& params, const Batch& batch,
                   AllocationLedger& ledger) {
  return ForwardLoss<T>(params.layout(), params.values(), batch, ledger);
}

template <typename T>
struct LossAndGradient {
  double loss = 0.0;
  TrackedBuffer<T> grad;  // kGrads, param_count elements
};

// Loss and its gradient with respect to every parameter. The batched forward
// pass retains each block's activations (kActivation) until that block's
// backward step has consumed them, which is what makes activation memory
// scale with batch size times depth.
template <typename T>
LossAndGradient<T> Backward(const ModelLayout& layout,
                            std::span<const T> params, const Batch& batch,
                            AllocationLedger& ledger);

template <typename T>
LossAndGradient<T> Backward(const ParameterVector<T>& params,
                            const Batch& batch, AllocationLedger& ledger) {
  return Backward<T>(params.layout(), params.values(), batch, ledger);
}

// Elements one block retains for its backward step at the given batch size:
// normalized inputs of both layer norms, q, k, v, attention context and the
// MLP pre-activation (10 * s * d), attention scores and probabilities
// (2 * h * s^2), and two per-token inverse standard deviations.
uint64_t BlockActivationElements(const ModelConfig& config, int64_t batch);

extern template double ForwardLoss<float>(const ModelLayout&,
                                          std::span<const float>,
                                          const Batch&, AllocationLedger&);
extern template double ForwardLoss<double>(const ModelLayout&,
                                           std::span<const double>,
                                           const Batch&, AllocationLedger&);
extern template LossAndGradient<float> Backward<float>(const ModelLayout&,
                                                       std::span<const float>,
                                                       const Batch&,
                                                       AllocationLedger&);
extern template LossAndGradient<double> Backward<double>(
    const ModelLayout&, std::span<const double>, const Batch&,
    AllocationLedger&);

}  // namespace zolab

#endif  // ZOLAB_TRANSFORMER_H_
