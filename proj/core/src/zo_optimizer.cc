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

#include "zolab/zo_optimizer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "zolab/errors.h"
#include "zolab/rng.h"

namespace zolab {
namespace {

int64_t NowMicros() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void RequireFiniteLoss(double loss, const char* which) {
  if (!std::isfinite(loss)) {
    throw NumericError("objective", std::string("non-finite ") + which);
  }
}

// With `restore` false the parameters are left at theta - eps z; parallel
// workers discard their replica afterwards.
template <typename T>
ProbeResult EvaluateProbe(std::span<T> params, const Objective<T>& objective,
                          double epsilon, ProbeSeed seed,
                          SeedReplayPerturber<T>& perturber, bool restore) {
  if (!(epsilon > 0.0)) {
    throw PreconditionError("perturbation scale epsilon must be > 0");
  }
  const T eps = static_cast<T>(epsilon);
  ProbeResult result;
  result.seed = seed;

  perturber.Perturb(params, seed, eps);
  try {
    result.loss_plus = objective(params);
    RequireFiniteLoss(result.loss_plus, "loss at +epsilon");
  } catch (...) {
    if (restore) perturber.Perturb(params, seed, -eps);
    throw;
  }
  perturber.Perturb(params, seed, T(-2) * eps);
  try {
    result.loss_minus = objective(params);
    RequireFiniteLoss(result.loss_minus, "loss at -epsilon");
  } catch (...) {
    if (restore) perturber.Perturb(params, seed, eps);
    throw;
  }
  if (restore) perturber.Perturb(params, seed, eps);
  result.projected_grad =
      (result.loss_plus - result.loss_minus) / (2.0 * epsilon);
  return result;
}

const ZoConfig& Validated(const ZoConfig& config) {
  config.Validate();
  return config;
}

}  // namespace

void ZoConfig::Validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("zo epsilon must be > 0");
  if (!(lr >= 0.0)) throw ConfigError("zo learning rate must be >= 0");
  if (probes < 1) throw ConfigError("zo probes must be >= 1");
  if (workers < 0) throw ConfigError("zo workers must be >= 0");
  if (parallel && probes < 2) {
    throw ConfigError("parallel probe evaluation needs at least 2 probes");
  }
  if (chunk_elements == 0) throw ConfigError("chunk size must be > 0");
}

int64_t ZoConfig::EffectiveWorkers() const {
  return workers == 0 ? probes : std::min(workers, probes);
}

template <typename T>
DirectionFill<T> GaussianDirections() {
  return [](ProbeSeed seed, uint64_t start, std::span<T> out) {
    NormalStreamFill(seed.value, start, out);
  };
}

template DirectionFill<float> GaussianDirections<float>();
template DirectionFill<double> GaussianDirections<double>();

template <typename T>
SeedReplayPerturber<T>::SeedReplayPerturber(AllocationLedger& ledger,
                                            size_t chunk_elements,
                                            DirectionFill<T> directions)
    : chunk_(ledger, Category::kTransient, chunk_elements),
      directions_(std::move(directions)) {}

template <typename T>
void SeedReplayPerturber<T>::Perturb(std::span<T> params, ProbeSeed seed,
                                     T scale) {
  const size_t n = params.size();
  const size_t chunk = chunk_.size();
  for (size_t base = 0; base < n; base += chunk) {
    const size_t len = std::min(chunk, n - base);
    std::span<T> z = chunk_.span().first(len);
    directions_(seed, base, z);
    T* p = params.data() + base;
    for (size_t i = 0; i < len; ++i) p[i] += scale * z[i];
  }
}

template <typename T>
void SeedReplayPerturber<T>::ReplayRestoreDrift(std::span<T> params,
                                                ProbeSeed seed, T epsilon) {
  const T down = T(-2) * epsilon;
  const size_t n = params.size();
  const size_t chunk = chunk_.size();
  for (size_t base = 0; base < n; base += chunk) {
    const size_t len = std::min(chunk, n - base);
    std::span<T> z = chunk_.span().first(len);
    directions_(seed, base, z);
    T* p = params.data() + base;
    for (size_t i = 0; i < len; ++i) {
      p[i] += epsilon * z[i];
      p[i] += down * z[i];
      p[i] += epsilon * z[i];
    }
  }
}

template <typename T>
ProbeResult SpsaEstimate(std::span<T> params, const Objective<T>& objective,
                         double epsilon, ProbeSeed seed,
                         SeedReplayPerturber<T>& perturber) {
  return EvaluateProbe(params, objective, epsilon, seed, perturber,
                       /*restore=*/true);
}

template ProbeResult SpsaEstimate<float>(std::span<float>,
                                         const Objective<float>&, double,
                                         ProbeSeed,
                                         SeedReplayPerturber<float>&);
template ProbeResult SpsaEstimate<double>(std::span<double>,
                                          const Objective<double>&, double,
                                          ProbeSeed,
                                          SeedReplayPerturber<double>&);

template <typename T>
ZoOptimizer<T>::ZoOptimizer(const ZoConfig& config, AllocationLedger& ledger,
                            DirectionFill<T> directions)
    : config_(Validated(config)),
      ledger_(ledger),
      directions_(std::move(directions)),
      perturber_(ledger, config.chunk_elements, directions_) {}

template <typename T>
ZoOptimizer<T>::~ZoOptimizer() = default;

template <typename T>
ProbeSeed ZoOptimizer<T>::SeedFor(int64_t step_index, int64_t probe) const {
  return ProbeSeed{DeriveProbeSeed(config_.seed_base,
                                   static_cast<uint64_t>(step_index),
                                   static_cast<uint64_t>(probe))};
}

template <typename T>
StepRecord ZoOptimizer<T>::Step(std::span<T> params,
                                const Objective<T>& objective,
                                int64_t step_index) {
  return config_.parallel ? StepParallel(params, objective, step_index)
                          : StepSerial(params, objective, step_index);
}

template <typename T>
void ZoOptimizer<T>::ApplyUpdate(std::span<T> params,
                                 SeedReplayPerturber<T>& perturber) {
  const double n = static_cast<double>(probes_.size());
  for (const ProbeResult& probe : probes_) {
    const T scale = static_cast<T>(-config_.lr * probe.projected_grad / n);
    if (scale == T(0)) continue;
    perturber.Perturb(params, probe.seed, scale);
  }
}

template <typename T>
StepRecord ZoOptimizer<T>::Finish(int64_t step_index, int64_t evaluations,
                                  int64_t start_us) const {
  StepRecord record;
  record.step = step_index;
  double loss = 0.0;
  for (const ProbeResult& probe : probes_) {
    loss += 0.5 * (probe.loss_plus + probe.loss_minus);
  }
  record.loss = loss / static_cast<double>(probes_.size());
  record.loss_evaluations = evaluations;
  record.peaks = ledger_.WindowPeaks();
  record.elapsed_us = NowMicros() - start_us;
  return record;
}

template <typename T>
StepRecord ZoOptimizer<T>::StepSerial(std::span<T> params,
                                      const Objective<T>& objective,
                                      int64_t step_index) {
  ledger_.BeginWindow();
  const int64_t start = NowMicros();
  int64_t evaluations = 0;
  const Objective<T> counted = [&](std::span<const T> values) {
    ++evaluations;
    return objective(values);
  };
  probes_.clear();
  for (int64_t k = 0; k < config_.probes; ++k) {
    probes_.push_back(SpsaEstimate(params, counted, config_.epsilon,
                                   SeedFor(step_index, k), perturber_));
  }
  ApplyUpdate(params, perturber_);
  return Finish(step_index, evaluations, start);
}

template <typename T>
StepRecord ZoOptimizer<T>::StepParallel(std::span<T> params,
                                        const Objective<T>& objective,
                                        int64_t step_index) {
  if (config_.probes < 2) {
    throw PreconditionError("parallel probe evaluation needs >= 2 probes");
  }
  ledger_.BeginWindow();
  const int64_t start = NowMicros();
  const size_t n = static_cast<size_t>(config_.probes);
  const size_t workers = static_cast<size_t>(config_.EffectiveWorkers());
  if (!pool_ || pool_->size() != workers) {
    pool_ = std::make_unique<WorkerPool>(workers);
  }

  std::vector<TrackedBuffer<T>> replicas;
  std::vector<std::unique_ptr<SeedReplayPerturber<T>>> perturbers;
  replicas.reserve(workers);
  perturbers.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    replicas.emplace_back(ledger_, Category::kTransient, params.size());
    perturbers.push_back(std::make_unique<SeedReplayPerturber<T>>(
        ledger_, config_.chunk_elements, directions_));
  }

  std::atomic<int64_t> evaluations{0};
  const Objective<T> counted = [&](std::span<const T> values) {
    evaluations.fetch_add(1, std::memory_order_relaxed);
    return objective(values);
  };
  const T eps = static_cast<T>(config_.epsilon);
  std::vector<ProbeResult> results(n);
  const std::vector<std::exception_ptr> errors =
      pool_->Run(n, [&](size_t k, size_t w) {
        std::span<T> replica = replicas[w].span();
        std::copy(params.begin(), params.end(), replica.begin());
        for (size_t j = 0; j < k; ++j) {
          perturbers[w]->ReplayRestoreDrift(replica, SeedFor(step_index, j),
                                            eps);
        }
        results[k] = EvaluateProbe(replica, counted, config_.epsilon,
                                   SeedFor(step_index, k), *perturbers[w],
                                   /*restore=*/false);
      });
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  replicas.clear();
  perturbers.clear();

  probes_ = std::move(results);
  for (size_t j = 0; j < n; ++j) {
    perturber_.ReplayRestoreDrift(params, SeedFor(step_index, j), eps);
  }
  ApplyUpdate(params, perturber_);
  return Finish(step_index, evaluations.load(), start);
}

template class SeedReplayPerturber<float>;
template class SeedReplayPerturber<double>;
template class ZoOptimizer<float>;
template class ZoOptimizer<double>;

}  // namespace zolab
