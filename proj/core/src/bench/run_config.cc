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

#include "zolab/bench/run_config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "zolab/errors.h"

namespace zolab::bench {

const std::vector<std::string_view>& KnownConfigKeys() {
  static const std::vector<std::string_view> keys = {
      "model.preset",    "model.vocab_size", "model.dim",
      "model.layers",    "model.heads",      "model.seq_len",
      "model.classes",   "model.dtype",      "model.seed",
      "opt.kind",        "opt.lr",           "opt.epsilon",
      "opt.probes",      "opt.parallel",     "opt.workers",
      "opt.seed",        "opt.chunk",        "opt.beta1",
      "opt.beta2",       "opt.eps",          "train.batch_size",
      "train.steps",     "train.seed",       "data.task",
      "data.size",       "data.seed",        "data.path",
      "budget.bytes",    "report.out_dir",   "opt.mezo.lr",
      "opt.sgd.lr",      "opt.adam.lr",
  };
  return keys;
}

namespace {

std::string_view Trim(std::string_view s) {
  constexpr std::string_view kBlank = " \t\r\n";
  const size_t first = s.find_first_not_of(kBlank);
  if (first == std::string_view::npos) return {};
  const size_t last = s.find_last_not_of(kBlank);
  return s.substr(first, last - first + 1);
}

bool IsKnown(std::string_view key) {
  const auto& keys = KnownConfigKeys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::pair<std::string, std::string> SplitAssignment(std::string_view line) {
  const size_t eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected 'key = value', got '" + std::string(line) +
                      "'");
  }
  std::string key(Trim(line.substr(0, eq)));
  std::string value(Trim(line.substr(eq + 1)));
  if (!IsKnown(key)) throw ConfigError("unknown config key '" + key + "'");
  return {std::move(key), std::move(value)};
}

template <typename Int>
Int ParseInt(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" +
                      std::string(value) + "'");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false");
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

ConfigEntries ParseConfigEntries(std::string_view text) {
  ConfigEntries entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line(raw);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    auto [key, value] = SplitAssignment(line);
    if (entries.contains(key)) {
      throw ConfigError("duplicate config key '" + key + "'");
    }
    entries.emplace(std::move(key), std::move(value));
  }
  return entries;
}

void ApplyOverride(ConfigEntries& entries, std::string_view assignment) {
  auto [key, value] = SplitAssignment(Trim(assignment));
  entries[key] = std::move(value);
}

ConfigEntries LoadConfigEntries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfigEntries(text.str());
}

RunConfig BuildRunConfig(const ConfigEntries& entries) {
  RunConfig c;
  auto get = [&](std::string_view key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("model.preset")) {
    c.preset = *v;
    c.model = FindPreset(*v).config;
  }
  auto set_int = [&](std::string_view key, auto& field) {
    if (const auto* v = get(key)) {
      field = ParseInt<std::remove_reference_t<decltype(field)>>(key, *v);
    }
  };
  auto set_double = [&](std::string_view key, double& field) {
    if (const auto* v = get(key)) field = ParseDouble(key, *v);
  };
  set_int("model.vocab_size", c.model.vocab_size);
  set_int("model.dim", c.model.dim);
  set_int("model.layers", c.model.layers);
  set_int("model.heads", c.model.heads);
  set_int("model.seq_len", c.model.seq_len);
  set_int("model.classes", c.model.classes);
  if (const auto* v = get("model.dtype")) c.model.dtype = ParseDType(*v);
  set_int("model.seed", c.model_seed);

  if (const auto* v = get("opt.kind")) c.optimizer = ParseOptimizer(*v);
  if (const auto* v = get("opt.lr")) {
    const double lr = ParseDouble("opt.lr", *v);
    c.zo.lr = lr;
    c.sgd.lr = lr;
    c.adam.lr = lr;
  }
  set_double("opt.mezo.lr", c.zo.lr);
  set_double("opt.sgd.lr", c.sgd.lr);
  set_double("opt.adam.lr", c.adam.lr);
  set_double("opt.epsilon", c.zo.epsilon);
  set_int("opt.probes", c.zo.probes);
  if (const auto* v = get("opt.parallel")) {
    c.zo.parallel = ParseBool("opt.parallel", *v);
  }
  set_int("opt.workers", c.zo.workers);
  set_int("opt.seed", c.zo.seed_base);
  set_int("opt.chunk", c.zo.chunk_elements);
  set_double("opt.beta1", c.adam.beta1);
  set_double("opt.beta2", c.adam.beta2);
  set_double("opt.eps", c.adam.eps);

  set_int("train.batch_size", c.batch_size);
  set_int("train.steps", c.steps);
  set_int("train.seed", c.train_seed);

  if (const auto* v = get("data.task")) c.task = ParseTask(*v);
  set_int("data.size", c.data_size);
  set_int("data.seed", c.data_seed);
  if (const auto* v = get("data.path")) c.data_path = *v;

  if (const auto* v = get("budget.bytes")) {
    c.budget_bytes = ParseInt<uint64_t>("budget.bytes", *v);
  }
  if (const auto* v = get("report.out_dir")) c.out_dir = *v;
  c.Validate();
  return c;
}

RunConfig ParseRunConfig(std::string_view text) {
  return BuildRunConfig(ParseConfigEntries(text));
}

void RunConfig::Validate() const {
  model.Validate();
  if (steps < 1) throw ConfigError("train.steps must be >= 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (task == TaskKind::kCsv) {
    if (data_path.empty()) throw ConfigError("data.task=csv needs data.path");
  } else if (data_size < batch_size) {
    throw ConfigError("data.size must be >= train.batch_size");
  }
  if (task != TaskKind::kCsv && model.classes != 2) {
    throw ConfigError("synthetic tasks are binary; model.classes must be 2");
  }
  if (budget_bytes && *budget_bytes == 0) {
    throw ConfigError("budget.bytes must be > 0");
  }
  switch (optimizer) {
    case OptimizerKind::kMezo:
      zo.Validate();
      break;
    case OptimizerKind::kSgd:
      sgd.Validate();
      break;
    case OptimizerKind::kAdam:
      adam.Validate();
      break;
  }
}

ConfigEntries RunConfig::Echo() const {
  ConfigEntries e;
  e["model.preset"] = preset;
  e["model.vocab_size"] = std::to_string(model.vocab_size);
  e["model.dim"] = std::to_string(model.dim);
  e["model.layers"] = std::to_string(model.layers);
  e["model.heads"] = std::to_string(model.heads);
  e["model.seq_len"] = std::to_string(model.seq_len);
  e["model.classes"] = std::to_string(model.classes);
  e["model.dtype"] = std::string(DTypeName(model.dtype));
  e["model.seed"] = std::to_string(model_seed);
  e["opt.kind"] = std::string(OptimizerName(optimizer));
  switch (optimizer) {
    case OptimizerKind::kMezo:
      e["opt.lr"] = FormatDouble(zo.lr);
      e["opt.epsilon"] = FormatDouble(zo.epsilon);
      e["opt.probes"] = std::to_string(zo.probes);
      e["opt.parallel"] = zo.parallel ? "true" : "false";
      e["opt.workers"] = std::to_string(zo.workers);
      e["opt.seed"] = std::to_string(zo.seed_base);
      e["opt.chunk"] = std::to_string(zo.chunk_elements);
      break;
    case OptimizerKind::kSgd:
      e["opt.lr"] = FormatDouble(sgd.lr);
      break;
    case OptimizerKind::kAdam:
      e["opt.lr"] = FormatDouble(adam.lr);
      e["opt.beta1"] = FormatDouble(adam.beta1);
      e["opt.beta2"] = FormatDouble(adam.beta2);
      e["opt.eps"] = FormatDouble(adam.eps);
      break;
  }
  e["train.batch_size"] = std::to_string(batch_size);
  e["train.steps"] = std::to_string(steps);
  e["train.seed"] = std::to_string(train_seed);
  e["data.task"] = std::string(TaskName(task));
  if (task == TaskKind::kCsv) {
    e["data.path"] = data_path;
  } else {
    e["data.size"] = std::to_string(data_size);
    e["data.seed"] = std::to_string(data_seed);
  }
  if (budget_bytes) e["budget.bytes"] = std::to_string(*budget_bytes);
  if (!out_dir.empty()) e["report.out_dir"] = out_dir;
  return e;
}

std::string RunConfig::ToText() const {
  const ConfigEntries e = Echo();
  std::string out;
  for (std::string_view key : KnownConfigKeys()) {
    auto it = e.find(key);
    if (it == e.end()) continue;
    out += it->first + " = " + it->second + "\n";
  }
  return out;
}

}  // namespace zolab::bench
