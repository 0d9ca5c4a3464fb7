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

#include "zolab/deriv_optimizer.h"

#include <chrono>
#include <cmath>
#include <string>

#include "zolab/errors.h"
#include "zolab/transformer.h"

namespace zolab {
namespace {

void RequireSameLength(size_t params, size_t grad) {
  if (params != grad) {
    throw PreconditionError("gradient length " + std::to_string(grad) +
                            " does not match parameter count " +
                            std::to_string(params));
  }
}

}  // namespace

void SgdConfig::Validate() const {
  if (!(lr >= 0.0)) throw ConfigError("sgd learning rate must be >= 0");
}

void AdamConfig::Validate() const {
  if (!(lr >= 0.0)) throw ConfigError("adam learning rate must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) {
    throw ConfigError("adam beta1 must lie in [0, 1)");
  }
  if (!(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam beta2 must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("adam eps must be > 0");
}

template <typename T>
void AdamStep(AdamState<T>& state, std::span<T> params,
              std::span<const T> grad, const AdamConfig& config) {
  RequireSameLength(params.size(), grad.size());
  RequireSameLength(params.size(), state.m.size());
  RequireSameLength(params.size(), state.v.size());
  ++state.t;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  T* m = state.m.data();
  T* v = state.v.data();
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    const double mi = b1 * m[i] + (1.0 - b1) * g;
    const double vi = b2 * v[i] + (1.0 - b2) * g * g;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double step =
        config.lr * (mi / bc1) / (std::sqrt(vi / bc2) + config.eps);
    params[i] = static_cast<T>(params[i] - step);
  }
}

template <typename T>
void SgdStep(std::span<T> params, std::span<const T> grad, double lr) {
  RequireSameLength(params.size(), grad.size());
  const T rate = static_cast<T>(lr);
  for (size_t i = 0; i < params.size(); ++i) params[i] -= rate * grad[i];
}

template <typename T>
DerivativeTrainer<T>::DerivativeTrainer(const DerivativeConfig& config,
                                        AllocationLedger& ledger)
    : config_(config), ledger_(ledger) {
  std::visit([](const auto& c) { c.Validate(); }, config_);
}

template <typename T>
StepRecord DerivativeTrainer<T>::Step(ParameterVector<T>& params,
                                      const Batch& batch, int64_t step_index) {
  ledger_.BeginWindow();
  const auto start = std::chrono::steady_clock::now();

  LossAndGradient<T> result = Backward(params, batch, ledger_);
  if (const auto* adam = std::get_if<AdamConfig>(&config_)) {
    if (!adam_) adam_.emplace(ledger_, params.param_count());
    AdamStep(*adam_, params.values(), std::span<const T>(result.grad.span()),
             *adam);
  } else {
    SgdStep(params.values(), std::span<const T>(result.grad.span()),
            std::get<SgdConfig>(config_).lr);
  }
  result.grad.Reset();

  StepRecord record;
  record.step = step_index;
  record.loss = result.loss;
  record.loss_evaluations = 1;
  record.peaks = ledger_.WindowPeaks();
  record.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return record;
}

template void AdamStep<float>(AdamState<float>&, std::span<float>,
                              std::span<const float>, const AdamConfig&);
template void AdamStep<double>(AdamState<double>&, std::span<double>,
                               std::span<const double>, const AdamConfig&);
template void SgdStep<float>(std::span<float>, std::span<const float>, double);
template void SgdStep<double>(std::span<double>, std::span<const double>,
                              double);
template class DerivativeTrainer<float>;
template class DerivativeTrainer<double>;

}  // namespace zolab
