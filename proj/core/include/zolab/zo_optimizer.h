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

#ifndef ZOLAB_ZO_OPTIMIZER_H_
#define ZOLAB_ZO_OPTIMIZER_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "zolab/ledger.h"
#include "zolab/step_record.h"
#include "zolab/worker_pool.h"

namespace zolab {

// Identifies one perturbation direction z. The direction is regenerated from
// the seed whenever it is needed and never stored whole.
struct ProbeSeed {
  uint64_t value = 0;
  friend auto operator<=>(const ProbeSeed&, const ProbeSeed&) = default;
};

inline constexpr size_t kDefaultChunkElements = 8192;

struct ZoConfig {
  double epsilon = 1e-3;
  double lr = 1e-6;
  int64_t probes = 1;
  bool parallel = false;
  // Concurrent workers in parallel mode; 0 means one per probe.
  int64_t workers = 0;
  uint64_t seed_base = 0;
  size_t chunk_elements = kDefaultChunkElements;

  // Throws ConfigError.
  void Validate() const;
  int64_t EffectiveWorkers() const;
};

struct ProbeResult {
  ProbeSeed seed;
  double projected_grad = 0.0;  // (loss_plus - loss_minus) / (2 epsilon)
  double loss_plus = 0.0;
  double loss_minus = 0.0;
};

template <typename T>
using Objective = std::function<double(std::span<const T>)>;

// Writes direction elements [start, start + out.size()) for `seed`.
template <typename T>
using DirectionFill =
    std::function<void(ProbeSeed seed, uint64_t start, std::span<T> out)>;

// i.i.d. standard normal directions from the counter-based stream.
template <typename T>
DirectionFill<T> GaussianDirections();

// Applies params[i] += scale * z[i] chunk by chunk, regenerating z from the
// seed. Extra memory is one chunk (kTransient), independent of the number of
// parameters.
template <typename T>
class SeedReplayPerturber {
 public:
  explicit SeedReplayPerturber(
      AllocationLedger& ledger, size_t chunk_elements = kDefaultChunkElements,
      DirectionFill<T> directions = GaussianDirections<T>());

  void Perturb(std::span<T> params, ProbeSeed seed, T scale);

  // Applies +eps, -2eps, +eps in one sweep, reproducing bit for bit the
  // rounding a full perturb/evaluate/restore cycle leaves behind.
  void ReplayRestoreDrift(std::span<T> params, ProbeSeed seed, T epsilon);

  size_t chunk_elements() const { return chunk_.size(); }

 private:
  TrackedBuffer<T> chunk_;
  DirectionFill<T> directions_;
};

// Two-point estimate along z(seed): perturb(+eps), evaluate, perturb(-2eps),
// evaluate, perturb(+eps). Exactly two objective evaluations. Parameters come
// back equal to the input up to rounding, also when an evaluation throws or
// returns a non-finite value (reported as NumericError).
template <typename T>
ProbeResult SpsaEstimate(std::span<T> params, const Objective<T>& objective,
                         double epsilon, ProbeSeed seed,
                         SeedReplayPerturber<T>& perturber);

// Derivative-free optimizer with seed replay. Each step draws `probes` seeds
// DeriveProbeSeed(seed_base, step, k), estimates projected gradients g_k and
// applies params -= lr / n * sum_k g_k z_k one probe at a time.
//
// Serial mode mutates params in place and needs one chunk of scratch. Parallel
// mode evaluates probes on per-worker parameter replicas (kTransient) and
// produces bitwise the same parameters as serial mode: a replica for probe k
// first replays the restore rounding of probes 0..k-1.
template <typename T>
class ZoOptimizer {
 public:
  ZoOptimizer(const ZoConfig& config, AllocationLedger& ledger,
              DirectionFill<T> directions = GaussianDirections<T>());
  ~ZoOptimizer();

  // Dispatches on config.parallel.
  StepRecord Step(std::span<T> params, const Objective<T>& objective,
                  int64_t step_index);
  StepRecord StepSerial(std::span<T> params, const Objective<T>& objective,
                        int64_t step_index);
  StepRecord StepParallel(std::span<T> params, const Objective<T>& objective,
                          int64_t step_index);

  const ZoConfig& config() const { return config_; }
  // Probe results of the most recent step, in seed order.
  const std::vector<ProbeResult>& last_probes() const { return probes_; }

 private:
  ProbeSeed SeedFor(int64_t step_index, int64_t probe) const;
  void ApplyUpdate(std::span<T> params, SeedReplayPerturber<T>& perturber);
  StepRecord Finish(int64_t step_index, int64_t evaluations,
                    int64_t start_us) const;

  ZoConfig config_;
  AllocationLedger& ledger_;
  DirectionFill<T> directions_;
  SeedReplayPerturber<T> perturber_;
  std::unique_ptr<WorkerPool> pool_;
  std::vector<ProbeResult> probes_;
};

extern template class SeedReplayPerturber<float>;
extern template class SeedReplayPerturber<double>;
extern template class ZoOptimizer<float>;
extern template class ZoOptimizer<double>;

}  // namespace zolab

#endif  // ZOLAB_ZO_OPTIMIZER_H_
