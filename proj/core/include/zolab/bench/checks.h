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

#ifndef ZOLAB_BENCH_CHECKS_H_
#define ZOLAB_BENCH_CHECKS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zolab/model.h"
#include "zolab/zo_optimizer.h"

namespace zolab::bench {

struct GradCheckOptions {
  ModelConfig model = [] {
    ModelConfig c;
    c.dtype = DType::kF64;
    return c;
  }();
  int64_t coords = 200;
  double h = 1e-4;
  int64_t batch_size = 4;
  uint64_t seed = 1;
  double tolerance = 1e-4;
  // Relative errors divide by max(|analytic|, |numeric|, floor). Central
  // differences of an O(1) loss carry about 1e-16 / h absolute rounding, so
  // coordinates whose gradient is far below that cannot be resolved.
  double denominator_floor = 1e-7;
};

struct GradCheckResult {
  int64_t coords_checked = 0;
  double loss = 0.0;
  double max_rel_error = 0.0;
  size_t worst_index = 0;
  std::string worst_tensor;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = false;
  double elapsed_ms = 0.0;
};

// Backward against central differences on a marker-detect batch. One
// coordinate is taken from every tensor, the rest uniformly at random without
// repetition. The model must be f64.
GradCheckResult RunGradCheck(const GradCheckOptions& options);

struct ProbeStatsOptions {
  int64_t dim = 50;
  int64_t probes = 1000;
  double epsilon = 1e-3;
  uint64_t seed = 1;
  // Probe counts for the variance ladder and trials per rung.
  std::vector<int64_t> ladder = {1, 10, 100, 1000};
  int64_t trials = 200;
  // Defaults to Gaussian directions.
  DirectionFill<double> directions;
};

struct ProbeLadderRung {
  int64_t probes = 0;
  double mean_cosine = 0.0;
  double cosine_variance = 0.0;
  // Mean of |g_hat - grad|^2 / |grad|^2 over trials.
  double relative_mse = 0.0;
};

struct ProbeStatsResult {
  int64_t dim = 0;
  int64_t probes = 0;
  double cosine = 0.0;  // probe-mean direction vs true gradient
  std::vector<ProbeLadderRung> ladder;
  double elapsed_ms = 0.0;
};

// SPSA on a seeded quadratic 0.5 sum a_i x_i^2 - b.x with a_i in [0.5, 2].
// Throws ConfigError unless dim >= 2 and probes >= 1.
ProbeStatsResult RunProbeStats(const ProbeStatsOptions& options);

}  // namespace zolab::bench

#endif  // ZOLAB_BENCH_CHECKS_H_
