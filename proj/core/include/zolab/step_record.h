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

#ifndef ZOLAB_STEP_RECORD_H_
#define ZOLAB_STEP_RECORD_H_

#include <cstdint>

#include "zolab/ledger.h"

namespace zolab {

// Metrics for one optimizer step. `peaks` are the ledger's window peaks over
// the step.
struct StepRecord {
  int64_t step = 0;
  double loss = 0.0;
  int64_t loss_evaluations = 0;
  int64_t elapsed_us = 0;
  CategoryBytes peaks;

  double elapsed_ms() const { return static_cast<double>(elapsed_us) / 1e3; }
};

}  // namespace zolab

#endif  // ZOLAB_STEP_RECORD_H_
