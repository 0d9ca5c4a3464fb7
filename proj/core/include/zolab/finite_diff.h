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

#ifndef ZOLAB_FINITE_DIFF_H_
#define ZOLAB_FINITE_DIFF_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "zolab/errors.h"
#include "zolab/ledger.h"
#include "zolab/model.h"
#include "zolab/transformer.h"

namespace zolab {

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for each requested
// coordinate (all coordinates when `coords` is empty). Costs two objective
// evaluations per coordinate; meant for small models and as a test oracle.
template <typename T>
std::vector<double> FiniteDiffGradient(
    const std::function<double(std::span<const T>)>& objective,
    std::span<const T> params, double h, std::span<const size_t> coords = {}) {
  if (!(h > 0.0)) throw PreconditionError("finite difference step must be > 0");
  std::vector<T> work(params.begin(), params.end());
  std::vector<size_t> all;
  if (coords.empty()) {
    all.resize(params.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    coords = all;
  }
  std::vector<double> grad;
  grad.reserve(coords.size());
  for (size_t i : coords) {
    const T original = work[i];
    work[i] = original + static_cast<T>(h);
    const double up = objective(work);
    work[i] = original - static_cast<T>(h);
    const double down = objective(work);
    work[i] = original;
    grad.push_back((up - down) / (2.0 * h));
  }
  return grad;
}

template <typename T>
std::vector<double> FiniteDiffGradient(const ParameterVector<T>& params,
                                       const Batch& batch, double h,
                                       std::span<const size_t> coords = {},
                                       AllocationLedger& ledger =
                                           UntrackedLedger()) {
  const ModelLayout& layout = params.layout();
  ValidateBatch(layout.config(), batch);
  return FiniteDiffGradient<T>(
      [&](std::span<const T> values) {
        return ForwardLoss<T>(layout, values, batch, ledger);
      },
      params.values(), h, coords);
}

}  // namespace zolab

#endif  // ZOLAB_FINITE_DIFF_H_
