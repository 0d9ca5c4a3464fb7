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

#include "zolab/bench/experiment.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "zolab/deriv_optimizer.h"
#include "zolab/errors.h"
#include "zolab/model.h"
#include "zolab/transformer.h"
#include "zolab/zo_optimizer.h"

namespace zolab::bench {

namespace {

Dataset LoadData(const RunConfig& c) {
  if (c.task == TaskKind::kCsv) {
    Dataset data = LoadCsvDataset(c.data_path, c.model.vocab_size,
                                  c.model.seq_len, c.model.classes);
    if (data.size() < c.batch_size) {
      throw ConfigError("csv dataset has fewer rows than train.batch_size");
    }
    return data;
  }
  return GenerateDataset(c.task, c.data_size, c.model.vocab_size,
                         c.model.seq_len, c.data_seed);
}

template <typename T>
void RunSteps(const RunConfig& c, AllocationLedger& ledger,
              int64_t& current_step, RunReport& report) {
  current_step = 0;
  ParameterVector<T> params = InitModel<T>(c.model, c.model_seed, ledger);
  report.param_count = params.param_count();
  const Dataset data = LoadData(c);
  BatchSampler sampler(data, c.batch_size, c.train_seed);

  if (c.optimizer == OptimizerKind::kMezo) {
    ZoOptimizer<T> zo(c.zo, ledger);
    report.workers = c.zo.parallel ? c.zo.EffectiveWorkers() : 1;
    const ModelLayout& layout = params.layout();
    for (int64_t step = 1; step <= c.steps; ++step) {
      current_step = step;
      const Batch batch = sampler.Next();
      const Objective<T> objective = [&](std::span<const T> values) {
        return ForwardLoss<T>(layout, values, batch, ledger);
      };
      report.steps.push_back(zo.Step(params.values(), objective, step));
    }
    return;
  }
  DerivativeConfig dc;
  if (c.optimizer == OptimizerKind::kAdam) {
    dc = c.adam;
  } else {
    dc = c.sgd;
  }
  DerivativeTrainer<T> trainer(dc, ledger);
  for (int64_t step = 1; step <= c.steps; ++step) {
    current_step = step;
    const Batch batch = sampler.Next();
    report.steps.push_back(trainer.Step(params, batch, step));
  }
}

}  // namespace

RunReport RunExperiment(const RunConfig& config) {
  config.Validate();
  RunReport report;
  report.config = config;
  report.hardware_threads = std::thread::hardware_concurrency();
  AllocationLedger ledger(config.budget_bytes);
  int64_t current_step = 0;
  try {
    if (config.model.dtype == DType::kF64) {
      RunSteps<double>(config, ledger, current_step, report);
    } else {
      RunSteps<float>(config, ledger, current_step, report);
    }
  } catch (const SimulatedOomError& e) {
    report.status = RunStatus::kOom;
    report.failed_step = current_step;
    report.failure = e.what();
  } catch (const NumericError& e) {
    report.status = RunStatus::kNumericError;
    report.failed_step = current_step;
    report.failure = e.what();
  }
  return report;
}

RunTotals RunReport::Totals() const {
  RunTotals t;
  t.steps = static_cast<int64_t>(steps.size());
  if (steps.empty()) return t;
  t.initial_loss = steps.front().loss;
  t.final_loss = steps.back().loss;
  for (const StepRecord& r : steps) {
    t.wall_us += r.elapsed_us;
    t.loss_evaluations += r.loss_evaluations;
    for (Category c : kAllCategories) {
      t.peaks[c] = std::max(t.peaks[c], r.peaks[c]);
    }
    t.peaks.total = std::max(t.peaks.total, r.peaks.total);
  }
  const size_t first = steps.size() > 1 ? 1 : 0;
  int64_t sum = 0;
  int64_t lo = steps[first].elapsed_us;
  int64_t hi = lo;
  for (size_t i = first; i < steps.size(); ++i) {
    sum += steps[i].elapsed_us;
    lo = std::min(lo, steps[i].elapsed_us);
    hi = std::max(hi, steps[i].elapsed_us);
  }
  t.mean_step_ms = static_cast<double>(sum) / 1e3 /
                   static_cast<double>(steps.size() - first);
  t.min_step_ms = static_cast<double>(lo) / 1e3;
  t.max_step_ms = static_cast<double>(hi) / 1e3;
  return t;
}

std::string_view StatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted:
      return "completed";
    case RunStatus::kOom:
      return "oom";
    case RunStatus::kNumericError:
      return "numeric_error";
  }
  return "unknown";
}

std::string FormatMillis(int64_t micros) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%lld.%03lld",
                static_cast<long long>(micros / 1000),
                static_cast<long long>(micros % 1000));
  return buf;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string StepsCsv(const RunReport& report) {
  std::string out(kStepsCsvHeader);
  out += '\n';
  for (const StepRecord& r : report.steps) {
    out += std::to_string(r.step) + ',' + FormatDouble(r.loss) + ',' +
           std::to_string(r.loss_evaluations) + ',' +
           FormatMillis(r.elapsed_us);
    for (Category c : {Category::kWeights, Category::kGrads,
                       Category::kOptState, Category::kActivation,
                       Category::kTransient}) {
      out += ',' + std::to_string(r.peaks[c]);
    }
    out += ',' + std::to_string(r.peaks.total) + '\n';
  }
  return out;
}

std::string SummaryJson(const RunReport& report) {
  using Json = nlohmann::ordered_json;
  const RunTotals t = report.Totals();
  Json j;
  Json config;
  for (const auto& [key, value] : report.config.Echo()) config[key] = value;
  j["config"] = config;
  j["status"] = StatusName(report.status);
  j["verdict"] = report.status == RunStatus::kOom ? "oom" : "fits";
  j["failed_step"] =
      report.failed_step ? Json(*report.failed_step) : Json(nullptr);
  if (report.failed_step) j["failure"] = report.failure;
  j["param_count"] = report.param_count;
  Json totals;
  totals["steps"] = t.steps;
  totals["wall_us"] = t.wall_us;
  totals["wall_ms"] = FormatMillis(t.wall_us);
  totals["loss_evaluations"] = t.loss_evaluations;
  totals["initial_loss"] = t.initial_loss;
  totals["final_loss"] = t.final_loss;
  Json peaks;
  for (Category c : kAllCategories) {
    if (c == Category::kOther) continue;
    peaks[std::string(CategoryName(c))] = t.peaks[c];
  }
  peaks["total"] = t.peaks.total;
  totals["peak_bytes"] = peaks;
  j["totals"] = totals;
  Json timing;
  timing["mean_step_ms"] = t.mean_step_ms;
  timing["min_step_ms"] = t.min_step_ms;
  timing["max_step_ms"] = t.max_step_ms;
  timing["warmup_steps_excluded"] = t.steps > 1 ? 1 : 0;
  j["timing"] = timing;
  Json env;
  env["hardware_threads"] = report.hardware_threads;
  env["workers"] = report.workers;
  env["dtype"] = DTypeName(report.config.model.dtype);
  j["environment"] = env;
  return j.dump(2) + "\n";
}

std::string LossDat(const RunReport& report) {
  std::string out = "# step loss\n";
  for (const StepRecord& r : report.steps) {
    out += std::to_string(r.step) + ' ' + FormatDouble(r.loss) + '\n';
  }
  return out;
}

namespace {

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void WriteRunReport(const RunReport& report, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw ConfigError("cannot create '" + dir + "': " + ec.message());
  WriteFile(root / "steps.csv", StepsCsv(report));
  WriteFile(root / "summary.json", SummaryJson(report));
  WriteFile(root / "loss.dat", LossDat(report));
}

}  // namespace zolab::bench
