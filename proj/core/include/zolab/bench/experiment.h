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

#ifndef ZOLAB_BENCH_EXPERIMENT_H_
#define ZOLAB_BENCH_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/bench/run_config.h"
#include "zolab/ledger.h"
#include "zolab/step_record.h"

namespace zolab::bench {

enum class RunStatus { kCompleted, kOom, kNumericError };

// Exact header of steps.csv.
inline constexpr std::string_view kStepsCsvHeader =
    "step,loss,loss_evaluations,elapsed_ms,peak_weights,peak_grads,"
    "peak_optstate,peak_activation,peak_transient,peak_total";

struct RunTotals {
  int64_t steps = 0;
  int64_t wall_us = 0;  // sum of per-step elapsed
  int64_t loss_evaluations = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  CategoryBytes peaks;  // per-column maxima over step records
  // Over steps after the first (warm-up) when there is more than one.
  double mean_step_ms = 0.0;
  double min_step_ms = 0.0;
  double max_step_ms = 0.0;
};

struct RunReport {
  RunConfig config;
  uint64_t param_count = 0;
  int64_t workers = 1;
  unsigned hardware_threads = 0;
  std::vector<StepRecord> steps;
  RunStatus status = RunStatus::kCompleted;
  // Step during which the run stopped early (simulated budget exceeded or a
  // non-finite loss); 0 means model or optimizer setup.
  std::optional<int64_t> failed_step;
  std::string failure;

  RunTotals Totals() const;
};

// Builds the model and data, then runs config.steps optimizer steps numbered
// from 1. Every model buffer goes through one ledger carrying the configured
// budget. A simulated OOM or a non-finite loss ends the run early with the
// matching status; the records of completed steps are kept. Configuration
// errors throw ConfigError.
RunReport RunExperiment(const RunConfig& config);

std::string StepsCsv(const RunReport& report);
std::string SummaryJson(const RunReport& report);
// "step loss" rows for gnuplot.
std::string LossDat(const RunReport& report);

// Writes steps.csv, summary.json and loss.dat into `dir` (created if needed).
void WriteRunReport(const RunReport& report, const std::string& dir);

std::string_view StatusName(RunStatus status);

// Milliseconds with exactly three decimals, from integer microseconds.
std::string FormatMillis(int64_t micros);
// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace zolab::bench

#endif  // ZOLAB_BENCH_EXPERIMENT_H_
