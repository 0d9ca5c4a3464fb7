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

#include "zolab/bench/checks.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "zolab/bench/dataset.h"
#include "zolab/errors.h"
#include "zolab/finite_diff.h"
#include "zolab/rng.h"
#include "zolab/transformer.h"

namespace zolab::bench {

namespace {

double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<size_t> SampleCoordinates(const ModelLayout& layout,
                                      int64_t count, uint64_t seed) {
  CounterRng rng(Mix64(seed ^ 0xC00D5ULL));
  std::vector<size_t> coords;
  std::unordered_set<size_t> seen;
  for (const TensorSlot& slot : layout.slots()) {
    if (static_cast<int64_t>(coords.size()) >= count) break;
    const size_t i = slot.offset + rng.UniformBelow(slot.size());
    coords.push_back(i);
    seen.insert(i);
  }
  const size_t p = layout.param_count();
  const size_t target = std::min<size_t>(count, p);
  while (coords.size() < target) {
    const size_t i = rng.UniformBelow(p);
    if (seen.insert(i).second) coords.push_back(i);
  }
  return coords;
}

std::string TensorAt(const ModelLayout& layout, size_t index) {
  for (const TensorSlot& slot : layout.slots()) {
    if (index >= slot.offset && index < slot.offset + slot.size()) {
      return slot.name;
    }
  }
  return "?";
}

}  // namespace

GradCheckResult RunGradCheck(const GradCheckOptions& options) {
  if (options.model.dtype != DType::kF64) {
    throw ConfigError("gradient check needs an f64 model");
  }
  if (options.coords < 1) throw ConfigError("coords must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  AllocationLedger ledger;
  ParameterVector<double> params =
      InitModel<double>(options.model, options.seed, ledger);
  const Dataset data = GenerateDataset(
      TaskKind::kMarkerDetect, options.batch_size, options.model.vocab_size,
      options.model.seq_len, options.seed);
  BatchSampler sampler(data, options.batch_size, options.seed);
  const Batch batch = sampler.Next();

  const LossAndGradient<double> analytic = Backward(params, batch, ledger);
  const std::vector<size_t> coords =
      SampleCoordinates(params.layout(), options.coords, options.seed);
  const std::vector<double> numeric =
      FiniteDiffGradient(params, batch, options.h, coords, ledger);

  GradCheckResult result;
  result.loss = analytic.loss;
  result.coords_checked = static_cast<int64_t>(coords.size());
  for (size_t k = 0; k < coords.size(); ++k) {
    const double a = analytic.grad[coords[k]];
    const double n = numeric[k];
    const double denom =
        std::max({std::abs(a), std::abs(n), options.denominator_floor});
    const double rel = std::abs(a - n) / denom;
    if (k == 0 || rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_index = coords[k];
      result.worst_analytic = a;
      result.worst_numeric = n;
    }
  }
  result.worst_tensor = TensorAt(params.layout(), result.worst_index);
  result.passed = result.max_rel_error <= options.tolerance;
  result.elapsed_ms = MillisSince(start);
  return result;
}

namespace {

struct Quadratic {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> x0;

  double operator()(std::span<const double> x) const {
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      sum += 0.5 * a[i] * x[i] * x[i] - b[i] * x[i];
    }
    return sum;
  }
  std::vector<double> Gradient() const {
    std::vector<double> g(x0.size());
    for (size_t i = 0; i < g.size(); ++i) g[i] = a[i] * x0[i] - b[i];
    return g;
  }
};

Quadratic MakeQuadratic(int64_t dim, uint64_t seed) {
  CounterRng rng(Mix64(seed ^ 0x9AD2A71CULL));
  Quadratic q;
  for (int64_t i = 0; i < dim; ++i) {
    q.a.push_back(0.5 + 1.5 * rng.NextUnit());
    q.b.push_back(rng.NextNormal());
    q.x0.push_back(rng.NextNormal());
  }
  return q;
}

double Cosine(std::span<const double> u, std::span<const double> v) {
  const double uv = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
  const double uu = std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
  const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  return uv / std::sqrt(uu * vv);
}

// Mean of g_k z_k over `probes` seeds derived from (seed, trial).
std::vector<double> ProbeMean(const Quadratic& q, int64_t probes,
                              double epsilon, uint64_t seed, uint64_t trial,
                              const DirectionFill<double>& directions,
                              SeedReplayPerturber<double>& perturber) {
  const size_t dim = q.x0.size();
  std::vector<double> x = q.x0;
  std::vector<double> z(dim);
  std::vector<double> mean(dim, 0.0);
  const Objective<double> objective = [&](std::span<const double> v) {
    return q(v);
  };
  for (int64_t k = 0; k < probes; ++k) {
    const ProbeSeed s{DeriveProbeSeed(seed, trial, k)};
    const ProbeResult r = SpsaEstimate<double>(x, objective, epsilon, s,
                                               perturber);
    directions(s, 0, z);
    for (size_t i = 0; i < dim; ++i) mean[i] += r.projected_grad * z[i];
  }
  for (double& m : mean) m /= static_cast<double>(probes);
  return mean;
}

}  // namespace

ProbeStatsResult RunProbeStats(const ProbeStatsOptions& options) {
  if (options.dim < 2) throw ConfigError("probe-stats needs dim >= 2");
  if (options.probes < 1) throw ConfigError("probe-stats needs probes >= 1");
  if (options.trials < 1) throw ConfigError("probe-stats needs trials >= 1");
  const auto start = std::chrono::steady_clock::now();
  const DirectionFill<double> directions =
      options.directions ? options.directions : GaussianDirections<double>();
  const Quadratic q = MakeQuadratic(options.dim, options.seed);
  const std::vector<double> grad = q.Gradient();
  const double grad_sq =
      std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
  AllocationLedger ledger;
  SeedReplayPerturber<double> perturber(
      ledger, static_cast<size_t>(options.dim), directions);

  ProbeStatsResult result;
  result.dim = options.dim;
  result.probes = options.probes;
  const std::vector<double> mean = ProbeMean(
      q, options.probes, options.epsilon, options.seed, 0, directions,
      perturber);
  result.cosine = Cosine(mean, grad);

  uint64_t trial_id = 1;
  for (int64_t n : options.ladder) {
    if (n < 1) throw ConfigError("ladder probe counts must be >= 1");
    ProbeLadderRung rung;
    rung.probes = n;
    double sum = 0.0;
    double sum_sq = 0.0;
    double mse = 0.0;
    for (int64_t t = 0; t < options.trials; ++t) {
      const std::vector<double> m = ProbeMean(
          q, n, options.epsilon, options.seed, trial_id++, directions,
          perturber);
      const double c = Cosine(m, grad);
      sum += c;
      sum_sq += c * c;
      double err = 0.0;
      for (size_t i = 0; i < m.size(); ++i) {
        err += (m[i] - grad[i]) * (m[i] - grad[i]);
      }
      mse += err / grad_sq;
    }
    const double trials = static_cast<double>(options.trials);
    rung.mean_cosine = sum / trials;
    rung.cosine_variance =
        options.trials > 1
            ? (sum_sq - sum * sum / trials) / (trials - 1.0)
            : 0.0;
    rung.relative_mse = mse / trials;
    result.ladder.push_back(rung);
  }
  result.elapsed_ms = MillisSince(start);
  return result;
}

}  // namespace zolab::bench
