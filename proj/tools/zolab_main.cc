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

// zolab command line: run, compare, estimate-mem, grad-check, probe-stats.
//
// Exit codes: 0 success, 2 configuration error, 3 simulated or predicted
// out-of-memory, 4 numeric or check failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zolab/bench/checks.h"
#include "zolab/bench/experiment.h"
#include "zolab/bench/grid.h"
#include "zolab/bench/run_config.h"
#include "zolab/errors.h"
#include "zolab/memory_model.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOom = 3;
constexpr int kExitCheck = 4;

using zolab::bench::ConfigEntries;

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void AddConfigFlags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path,
                  "key=value config file");
  cmd->add_option("-s,--set", flags.overrides,
                  "override one key, e.g. --set train.steps=100");
  cmd->add_option("-o,--out", flags.out_dir, "output directory");
}

zolab::bench::RunConfig LoadRunConfig(const ConfigFlags& flags) {
  ConfigEntries entries;
  if (!flags.config_path.empty()) {
    entries = zolab::bench::LoadConfigEntries(flags.config_path);
  }
  for (const std::string& o : flags.overrides) {
    zolab::bench::ApplyOverride(entries, o);
  }
  if (!flags.out_dir.empty()) entries["report.out_dir"] = flags.out_dir;
  return zolab::bench::BuildRunConfig(entries);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<int64_t> ParseIntList(const std::string& text,
                                  const char* what) {
  std::vector<int64_t> out;
  for (const std::string& item : SplitList(text)) {
    try {
      size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw zolab::ConfigError(std::string("bad ") + what + " '" + item + "'");
    }
  }
  if (out.empty()) throw zolab::ConfigError(std::string("empty ") + what);
  return out;
}

int RunCommand(const ConfigFlags& flags) {
  const zolab::bench::RunConfig config = LoadRunConfig(flags);
  const zolab::bench::RunReport report = zolab::bench::RunExperiment(config);
  if (!config.out_dir.empty()) {
    zolab::bench::WriteRunReport(report, config.out_dir);
  }
  const zolab::bench::RunTotals t = report.Totals();
  std::printf("optimizer   %s\n",
              std::string(zolab::OptimizerName(config.optimizer)).c_str());
  std::printf("params      %llu\n",
              static_cast<unsigned long long>(report.param_count));
  std::printf("steps       %lld\n", static_cast<long long>(t.steps));
  if (t.steps > 0) {
    std::printf("loss        %.6f -> %.6f\n", t.initial_loss, t.final_loss);
    std::printf("step ms     mean %.3f  min %.3f  max %.3f\n", t.mean_step_ms,
                t.min_step_ms, t.max_step_ms);
    std::printf("peak bytes  %llu\n",
                static_cast<unsigned long long>(t.peaks.total));
  }
  if (report.status == zolab::bench::RunStatus::kOom) {
    std::printf("verdict     oom at step %lld\n",
                static_cast<long long>(*report.failed_step));
    return kExitOom;
  }
  if (report.status == zolab::bench::RunStatus::kNumericError) {
    std::fprintf(stderr, "numeric error at step %lld: %s\n",
                 static_cast<long long>(*report.failed_step),
                 report.failure.c_str());
    return kExitCheck;
  }
  std::printf("verdict     fits\n");
  return kExitOk;
}

struct CompareFlags {
  ConfigFlags config;
  std::string optimizers = "mezo,adam";
  std::string batch_sizes = "8,64";
  std::optional<uint64_t> budget_bytes;
  bool parallel_cells = false;
};

int CompareCommand(const CompareFlags& flags) {
  zolab::bench::RunConfig base = LoadRunConfig(flags.config);
  if (flags.budget_bytes) base.budget_bytes = *flags.budget_bytes;
  std::vector<zolab::OptimizerKind> optimizers;
  for (const std::string& name : SplitList(flags.optimizers)) {
    optimizers.push_back(zolab::ParseOptimizer(name));
  }
  const std::vector<int64_t> batch_sizes =
      ParseIntList(flags.batch_sizes, "batch size");
  zolab::bench::GridOptions options;
  options.parallel_cells = flags.parallel_cells;
  const std::string out_dir =
      base.out_dir.empty() ? std::string("compare_out") : base.out_dir;
  options.cell_dir = out_dir + "/cells";
  const zolab::bench::GridReport grid =
      zolab::bench::CompareGrid(base, optimizers, batch_sizes, options);
  zolab::bench::WriteGridReport(grid, out_dir);
  std::printf("peak bytes\n%s\nmean step ms\n%s",
              zolab::bench::GridMemoryTable(grid).c_str(),
              zolab::bench::GridTimeTable(grid).c_str());
  for (const zolab::bench::GridCell& cell : grid.cells) {
    if (cell.status == zolab::bench::CellStatus::kError) {
      std::fprintf(stderr, "cell %s b=%lld failed: %s\n",
                   std::string(zolab::OptimizerName(cell.optimizer)).c_str(),
                   static_cast<long long>(cell.batch_size),
                   cell.error.c_str());
    }
  }
  return kExitOk;
}

struct EstimateFlags {
  std::string preset = "toy";
  std::string optimizer = "adam";
  int64_t batch_size = 1;
  std::string dtype = "f32";
  int64_t probes = 1;
  int64_t workers = 1;
  std::optional<double> budget_gb;
  std::optional<uint64_t> budget_bytes;
  bool json = false;
};

int EstimateCommand(const EstimateFlags& flags) {
  zolab::MemoryEstimate estimate = zolab::EstimateFootprint(
      flags.preset, zolab::ParseOptimizer(flags.optimizer), flags.batch_size,
      zolab::ParseDType(flags.dtype), flags.probes, flags.workers);
  std::optional<uint64_t> budget = flags.budget_bytes;
  if (flags.budget_gb) {
    if (!(*flags.budget_gb > 0.0)) {
      throw zolab::ConfigError("--budget-gb must be > 0");
    }
    budget = static_cast<uint64_t>(std::llround(*flags.budget_gb * 1e9));
  }
  if (budget) estimate = zolab::WithBudget(estimate, *budget);
  if (flags.json) {
    std::printf("%s\n", zolab::ToJson(estimate).c_str());
  } else {
    std::printf("preset      %s (%llu parameters)\n",
                estimate.model_name.c_str(),
                static_cast<unsigned long long>(estimate.param_count));
    std::printf("optimizer   %s, batch %lld, %s\n",
                std::string(zolab::OptimizerName(estimate.optimizer)).c_str(),
                static_cast<long long>(estimate.batch_size),
                std::string(zolab::DTypeName(estimate.dtype)).c_str());
    for (zolab::Category c : zolab::kAllCategories) {
      if (c == zolab::Category::kOther) continue;
      std::printf("%-11s %15llu bytes  %8.3f GB\n",
                  std::string(zolab::CategoryName(c)).c_str(),
                  static_cast<unsigned long long>(estimate.bytes[c]),
                  static_cast<double>(estimate.bytes[c]) / 1e9);
    }
    std::printf("%-11s %15llu bytes  %8.3f GB\n", "total",
                static_cast<unsigned long long>(estimate.bytes.total),
                static_cast<double>(estimate.bytes.total) / 1e9);
    if (budget) {
      std::printf("budget      %15llu bytes  %8.3f GB\n",
                  static_cast<unsigned long long>(*budget),
                  static_cast<double>(*budget) / 1e9);
      std::printf("headroom    %15lld bytes\n",
                  static_cast<long long>(estimate.headroom));
      std::printf("verdict     %s\n",
                  std::string(zolab::VerdictName(estimate.verdict)).c_str());
    }
  }
  return budget && estimate.verdict == zolab::Verdict::kOom ? kExitOom
                                                            : kExitOk;
}

int GradCheckCommand(const zolab::bench::GradCheckOptions& options) {
  const zolab::bench::GradCheckResult r = zolab::bench::RunGradCheck(options);
  std::printf("coords      %lld\n", static_cast<long long>(r.coords_checked));
  std::printf("loss        %.10f\n", r.loss);
  std::printf("max rel err %.3e at %zu (%s: analytic %.6e, numeric %.6e)\n",
              r.max_rel_error, r.worst_index, r.worst_tensor.c_str(),
              r.worst_analytic, r.worst_numeric);
  std::printf("elapsed ms  %.1f\n", r.elapsed_ms);
  std::printf("result      %s (tolerance %.1e)\n", r.passed ? "pass" : "FAIL",
              options.tolerance);
  return r.passed ? kExitOk : kExitCheck;
}

struct ProbeFlags {
  zolab::bench::ProbeStatsOptions options;
  std::string ladder = "1,10,100,1000";
  bool json = false;
};

int ProbeStatsCommand(ProbeFlags flags) {
  flags.options.ladder = ParseIntList(flags.ladder, "ladder entry");
  const zolab::bench::ProbeStatsResult r =
      zolab::bench::RunProbeStats(flags.options);
  if (flags.json) {
    nlohmann::ordered_json j;
    j["dim"] = r.dim;
    j["probes"] = r.probes;
    j["cosine"] = r.cosine;
    nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
    for (const auto& rung : r.ladder) {
      ladder.push_back({{"probes", rung.probes},
                        {"mean_cosine", rung.mean_cosine},
                        {"cosine_variance", rung.cosine_variance},
                        {"relative_mse", rung.relative_mse}});
    }
    j["ladder"] = ladder;
    j["elapsed_ms"] = r.elapsed_ms;
    std::printf("%s\n", j.dump(2).c_str());
    return kExitOk;
  }
  std::printf("dim %lld, probes %lld\n", static_cast<long long>(r.dim),
              static_cast<long long>(r.probes));
  std::printf("cosine      %.6f\n", r.cosine);
  std::printf("%8s %12s %14s %14s %14s\n", "probes", "mean_cos", "var_cos",
              "rel_mse", "rel_mse*n");
  for (const auto& rung : r.ladder) {
    std::printf("%8lld %12.6f %14.6e %14.6e %14.6f\n",
                static_cast<long long>(rung.probes), rung.mean_cosine,
                rung.cosine_variance, rung.relative_mse,
                rung.relative_mse * static_cast<double>(rung.probes));
  }
  std::printf("elapsed ms  %.1f\n", r.elapsed_ms);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order vs derivative fine-tuning memory lab"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run one training experiment");
  AddConfigFlags(run, run_flags);

  CompareFlags compare_flags;
  CLI::App* compare =
      app.add_subcommand("compare", "Optimizer x batch-size grid");
  AddConfigFlags(compare, compare_flags.config);
  compare->add_option("--optimizers", compare_flags.optimizers,
                      "comma-separated optimizers");
  compare->add_option("--batch-sizes", compare_flags.batch_sizes,
                      "comma-separated batch sizes");
  compare->add_option("--budget-bytes", compare_flags.budget_bytes,
                      "simulated device budget");
  compare->add_flag("--parallel-cells", compare_flags.parallel_cells,
                    "run grid cells concurrently");

  EstimateFlags est;
  CLI::App* estimate =
      app.add_subcommand("estimate-mem", "Analytic memory footprint");
  estimate->add_option("--preset", est.preset,
                       "toy, toy-1m, roberta-large or opt-1.3b");
  estimate->add_option("--optimizer", est.optimizer, "mezo, adam or sgd");
  estimate->add_option("--batch-size", est.batch_size);
  estimate->add_option("--dtype", est.dtype, "f16, f32 or f64");
  estimate->add_option("--probes", est.probes);
  estimate->add_option("--workers", est.workers, "parallel probe workers");
  estimate->add_option("--budget-gb", est.budget_gb, "device budget, 1e9 B");
  estimate->add_option("--budget-bytes", est.budget_bytes);
  estimate->add_flag("--json", est.json);

  zolab::bench::GradCheckOptions gc;
  CLI::App* grad = app.add_subcommand(
      "grad-check", "Backward vs central differences on the toy f64 model");
  grad->add_option("--coords", gc.coords);
  grad->add_option("--step", gc.h, "finite difference step");
  grad->add_option("--batch-size", gc.batch_size);
  grad->add_option("--seed", gc.seed);
  grad->add_option("--tolerance", gc.tolerance);

  ProbeFlags pf;
  CLI::App* probe = app.add_subcommand(
      "probe-stats", "SPSA estimator quality on a random quadratic");
  probe->add_option("--dim", pf.options.dim);
  probe->add_option("--probes", pf.options.probes);
  probe->add_option("--epsilon", pf.options.epsilon);
  probe->add_option("--seed", pf.options.seed);
  probe->add_option("--trials", pf.options.trials);
  probe->add_option("--ladder", pf.ladder, "probe counts, comma-separated");
  probe->add_flag("--json", pf.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return RunCommand(run_flags);
    if (*compare) return CompareCommand(compare_flags);
    if (*estimate) return EstimateCommand(est);
    if (*grad) return GradCheckCommand(gc);
    if (*probe) return ProbeStatsCommand(pf);
  } catch (const zolab::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const zolab::PreconditionError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const zolab::SimulatedOomError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitOom;
  } catch (const zolab::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitCheck;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheck;
  }
  return kExitOk;
}
