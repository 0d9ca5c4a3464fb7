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

#ifndef ZOLAB_DERIV_OPTIMIZER_H_
#define ZOLAB_DERIV_OPTIMIZER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <variant>

#include "zolab/ledger.h"
#include "zolab/model.h"
#include "zolab/step_record.h"

namespace zolab {

struct SgdConfig {
  double lr = 1e-2;

  void Validate() const;
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void Validate() const;
};

// First and second moments, charged to the ledger as kOptState.
template <typename T>
struct AdamState {
  AdamState(AllocationLedger& ledger, size_t param_count)
      : m(ledger, Category::kOptState, param_count),
        v(ledger, Category::kOptState, param_count) {}

  TrackedBuffer<T> m;
  TrackedBuffer<T> v;
  int64_t t = 0;
};

// Bias-corrected Adam:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <typename T>
void AdamStep(AdamState<T>& state, std::span<T> params,
              std::span<const T> grad, const AdamConfig& config);

// theta <- theta - lr * g.
template <typename T>
void SgdStep(std::span<T> params, std::span<const T> grad, double lr);

using DerivativeConfig = std::variant<SgdConfig, AdamConfig>;

// Forward + backward + update over the transformer. Gradients are one flat
// kGrads buffer per step; Adam moments are allocated on the first step and
// kept for the trainer's lifetime.
template <typename T>
class DerivativeTrainer {
 public:
  DerivativeTrainer(const DerivativeConfig& config, AllocationLedger& ledger);

  StepRecord Step(ParameterVector<T>& params, const Batch& batch,
                  int64_t step_index);

  const std::optional<AdamState<T>>& adam_state() const { return adam_; }

 private:
  DerivativeConfig config_;
  AllocationLedger& ledger_;
  std::optional<AdamState<T>> adam_;
};

extern template void AdamStep<float>(AdamState<float>&, std::span<float>,
                                     std::span<const float>,
                                     const AdamConfig&);
extern template void AdamStep<double>(AdamState<double>&, std::span<double>,
                                      std::span<const double>,
                                      const AdamConfig&);
extern template void SgdStep<float>(std::span<float>, std::span<const float>,
                                    double);
extern template void SgdStep<double>(std::span<double>,
                                     std::span<const double>, double);
extern template class DerivativeTrainer<float>;
extern template class DerivativeTrainer<double>;

}  // namespace zolab

#endif  // ZOLAB_DERIV_OPTIMIZER_H_
