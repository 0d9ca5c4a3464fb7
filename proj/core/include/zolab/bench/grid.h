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

#ifndef ZOLAB_BENCH_GRID_H_
#define ZOLAB_BENCH_GRID_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/bench/experiment.h"
#include "zolab/bench/run_config.h"
#include "zolab/memory_model.h"

namespace zolab::bench {

inline constexpr std::string_view kGridCsvHeader =
    "optimizer,batch_size,status,oom_step,peak_weights,peak_grads,"
    "peak_optstate,peak_activation,peak_transient,peak_total,mean_step_ms,"
    "final_loss";

enum class CellStatus { kOk, kOom, kError };

struct GridCell {
  OptimizerKind optimizer = OptimizerKind::kMezo;
  int64_t batch_size = 0;
  CellStatus status = CellStatus::kOk;
  std::string error;  // kError only
  RunReport report;
};

struct GridReport {
  std::vector<OptimizerKind> optimizers;
  std::vector<int64_t> batch_sizes;
  std::vector<GridCell> cells;  // batch-size major, optimizer minor

  const GridCell& cell(OptimizerKind optimizer, int64_t batch_size) const;
};

struct GridOptions {
  // Runs cells concurrently, each with its own ledger. Timing columns are
  // then affected by contention; memory columns are not.
  bool parallel_cells = false;
  // When set, each cell's steps.csv/summary.json/loss.dat are written under
  // <cell_dir>/<optimizer>-b<batch>.
  std::string cell_dir;
};

// One RunExperiment per (optimizer, batch size) cell of `base`. A cell that
// fails records the error and the grid carries on.
GridReport CompareGrid(const RunConfig& base,
                       const std::vector<OptimizerKind>& optimizers,
                       const std::vector<int64_t>& batch_sizes,
                       const GridOptions& options = {});

// Long form, one row per cell. A simulated-OOM cell reads "OOM" with the
// failing step and no memory or timing numbers.
std::string GridCsv(const GridReport& grid);
// Batch sizes down, optimizers across, as a pivot table. Cells hold peak
// total bytes (or mean step milliseconds) or the literal OOM.
std::string GridMemoryTable(const GridReport& grid);
std::string GridTimeTable(const GridReport& grid);
std::string GridJson(const GridReport& grid);

// Writes grid.csv, grid.json, memory_table.csv and time_table.csv.
void WriteGridReport(const GridReport& grid, const std::string& dir);

}  // namespace zolab::bench

#endif  // ZOLAB_BENCH_GRID_H_
