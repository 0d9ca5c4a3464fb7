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

#include "zolab/bench/grid.h"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "zolab/errors.h"
#include "zolab/worker_pool.h"

namespace zolab::bench {

const GridCell& GridReport::cell(OptimizerKind optimizer,
                                 int64_t batch_size) const {
  for (const GridCell& c : cells) {
    if (c.optimizer == optimizer && c.batch_size == batch_size) return c;
  }
  throw PreconditionError("no such grid cell");
}

namespace {

std::string CellName(const GridCell& cell) {
  return std::string(OptimizerName(cell.optimizer)) + "-b" +
         std::to_string(cell.batch_size);
}

void RunCell(const RunConfig& base, const GridOptions& options,
             GridCell& cell) {
  RunConfig config = base;
  config.optimizer = cell.optimizer;
  config.batch_size = cell.batch_size;
  config.out_dir.clear();
  try {
    cell.report = RunExperiment(config);
    switch (cell.report.status) {
      case RunStatus::kCompleted:
        cell.status = CellStatus::kOk;
        break;
      case RunStatus::kOom:
        cell.status = CellStatus::kOom;
        break;
      case RunStatus::kNumericError:
        cell.status = CellStatus::kError;
        cell.error = cell.report.failure;
        break;
    }
    if (!options.cell_dir.empty()) {
      WriteRunReport(cell.report,
                     (std::filesystem::path(options.cell_dir) / CellName(cell))
                         .string());
    }
  } catch (const std::exception& e) {
    cell.status = CellStatus::kError;
    cell.error = e.what();
  }
}

}  // namespace

GridReport CompareGrid(const RunConfig& base,
                       const std::vector<OptimizerKind>& optimizers,
                       const std::vector<int64_t>& batch_sizes,
                       const GridOptions& options) {
  if (optimizers.empty() || batch_sizes.empty()) {
    throw ConfigError("grid needs at least one optimizer and batch size");
  }
  GridReport grid;
  grid.optimizers = optimizers;
  grid.batch_sizes = batch_sizes;
  for (int64_t b : batch_sizes) {
    for (OptimizerKind o : optimizers) {
      GridCell cell;
      cell.optimizer = o;
      cell.batch_size = b;
      grid.cells.push_back(std::move(cell));
    }
  }
  if (options.parallel_cells && grid.cells.size() > 1) {
    const size_t workers = std::clamp<size_t>(
        std::thread::hardware_concurrency(), 1, grid.cells.size());
    WorkerPool pool(workers);
    pool.Run(grid.cells.size(), [&](size_t i, size_t) {
      RunCell(base, options, grid.cells[i]);
    });
  } else {
    for (GridCell& cell : grid.cells) RunCell(base, options, cell);
  }
  return grid;
}

namespace {

std::string_view CellStatusName(CellStatus status) {
  switch (status) {
    case CellStatus::kOk:
      return "ok";
    case CellStatus::kOom:
      return "OOM";
    case CellStatus::kError:
      return "error";
  }
  return "error";
}

}  // namespace

std::string GridCsv(const GridReport& grid) {
  std::string out(kGridCsvHeader);
  out += '\n';
  for (const GridCell& cell : grid.cells) {
    out += std::string(OptimizerName(cell.optimizer)) + ',' +
           std::to_string(cell.batch_size) + ',' +
           std::string(CellStatusName(cell.status)) + ',';
    if (cell.status == CellStatus::kOom) {
      out += std::to_string(*cell.report.failed_step) + ",,,,,,,,\n";
      continue;
    }
    if (cell.status == CellStatus::kError) {
      out += ",,,,,,,,\n";
      continue;
    }
    const RunTotals t = cell.report.Totals();
    out += ',';
    for (Category c : {Category::kWeights, Category::kGrads,
                       Category::kOptState, Category::kActivation,
                       Category::kTransient}) {
      out += std::to_string(t.peaks[c]) + ',';
    }
    out += std::to_string(t.peaks.total) + ',' + FormatDouble(t.mean_step_ms) +
           ',' + FormatDouble(t.final_loss) + '\n';
  }
  return out;
}

namespace {

template <typename Render>
std::string PivotTable(const GridReport& grid, Render render) {
  std::string out = "batch_size";
  for (OptimizerKind o : grid.optimizers) {
    out += ',' + std::string(OptimizerName(o));
  }
  out += '\n';
  for (int64_t b : grid.batch_sizes) {
    out += std::to_string(b);
    for (OptimizerKind o : grid.optimizers) {
      const GridCell& cell = grid.cell(o, b);
      out += ',';
      if (cell.status == CellStatus::kOom) {
        out += "OOM";
      } else if (cell.status == CellStatus::kError) {
        out += "error";
      } else {
        out += render(cell.report.Totals());
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string GridMemoryTable(const GridReport& grid) {
  return PivotTable(grid, [](const RunTotals& t) {
    return std::to_string(t.peaks.total);
  });
}

std::string GridTimeTable(const GridReport& grid) {
  return PivotTable(
      grid, [](const RunTotals& t) { return FormatDouble(t.mean_step_ms); });
}

std::string GridJson(const GridReport& grid) {
  using Json = nlohmann::ordered_json;
  Json cells = Json::array();
  for (const GridCell& cell : grid.cells) {
    Json j;
    j["optimizer"] = OptimizerName(cell.optimizer);
    j["batch_size"] = cell.batch_size;
    j["status"] = CellStatusName(cell.status);
    if (cell.status == CellStatus::kOom) {
      j["oom_step"] = *cell.report.failed_step;
    } else if (cell.status == CellStatus::kError) {
      j["error"] = cell.error;
    } else {
      const RunTotals t = cell.report.Totals();
      Json peaks;
      for (Category c : kAllCategories) {
        if (c == Category::kOther) continue;
        peaks[std::string(CategoryName(c))] = t.peaks[c];
      }
      peaks["total"] = t.peaks.total;
      j["peak_bytes"] = peaks;
      j["mean_step_ms"] = t.mean_step_ms;
      j["min_step_ms"] = t.min_step_ms;
      j["max_step_ms"] = t.max_step_ms;
      j["final_loss"] = t.final_loss;
    }
    cells.push_back(j);
  }
  Json out;
  out["cells"] = cells;
  return out.dump(2) + "\n";
}

void WriteGridReport(const GridReport& grid, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw ConfigError("cannot create '" + dir + "': " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(root / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write into '" + dir + "'");
    out << text;
  };
  write("grid.csv", GridCsv(grid));
  write("grid.json", GridJson(grid));
  write("memory_table.csv", GridMemoryTable(grid));
  write("time_table.csv", GridTimeTable(grid));
}

}  // namespace zolab::bench
