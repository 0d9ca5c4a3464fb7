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

#include "zolab/bench/dataset.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>

#include "zolab/errors.h"
#include "zolab/rng.h"

namespace zolab::bench {

std::string_view TaskName(TaskKind task) {
  switch (task) {
    case TaskKind::kMarkerDetect:
      return "marker-detect";
    case TaskKind::kParity:
      return "parity";
    case TaskKind::kCsv:
      return "csv";
  }
  return "unknown";
}

TaskKind ParseTask(std::string_view name) {
  if (name == "marker-detect") return TaskKind::kMarkerDetect;
  if (name == "parity") return TaskKind::kParity;
  if (name == "csv") return TaskKind::kCsv;
  throw ConfigError("unknown data task '" + std::string(name) + "'");
}

bool ContainsMarker(std::span<const int32_t> sequence) {
  return std::any_of(sequence.begin(), sequence.end(), [](int32_t t) {
    return std::find(kMarkerTokens.begin(), kMarkerTokens.end(), t) !=
           kMarkerTokens.end();
  });
}

namespace {

constexpr int32_t kFirstPlainToken = 6;

void FillMarkerDetect(CounterRng& rng, int64_t vocab,
                      std::span<int32_t> sequence, int32_t& label) {
  const uint64_t plain = static_cast<uint64_t>(vocab - kFirstPlainToken);
  for (int32_t& t : sequence) {
    t = kFirstPlainToken + static_cast<int32_t>(rng.UniformBelow(plain));
  }
  label = static_cast<int32_t>(rng.UniformBelow(2));
  if (label == 1) {
    const uint64_t n = sequence.size();
    const uint64_t lo = std::max<uint64_t>(1, n / 4);
    const uint64_t hi = std::max<uint64_t>(lo, n / 2);
    const uint64_t count = lo + rng.UniformBelow(hi - lo + 1);
    for (uint64_t m = 0; m < count; ++m) {
      const uint64_t pos = rng.UniformBelow(sequence.size());
      sequence[pos] = kMarkerTokens[rng.UniformBelow(kMarkerTokens.size())];
    }
  }
}

void FillParity(CounterRng& rng, int64_t vocab, std::span<int32_t> sequence,
                int32_t& label) {
  int odd = 0;
  for (int32_t& t : sequence) {
    t = 1 + static_cast<int32_t>(rng.UniformBelow(vocab - 1));
    odd ^= t & 1;
  }
  label = odd;
}

}  // namespace

Dataset GenerateDataset(TaskKind task, int64_t size, int64_t vocab,
                        int64_t seq_len, uint64_t seed) {
  if (size < 1) throw ConfigError("dataset size must be >= 1");
  if (seq_len < 1) throw ConfigError("sequence length must be >= 1");
  if (task == TaskKind::kCsv) {
    throw ConfigError("csv datasets are loaded, not generated");
  }
  if (task == TaskKind::kMarkerDetect && vocab <= kFirstPlainToken) {
    throw ConfigError("marker-detect needs vocab_size > 6");
  }
  if (task == TaskKind::kParity && vocab < 3) {
    throw ConfigError("parity needs vocab_size >= 3");
  }
  Dataset data;
  data.seq_len = seq_len;
  data.tokens.resize(static_cast<size_t>(size * seq_len));
  data.labels.resize(static_cast<size_t>(size));
  CounterRng rng(Mix64(seed ^ 0xDA7A5E7ULL));
  std::span<int32_t> all(data.tokens);
  for (int64_t i = 0; i < size; ++i) {
    std::span<int32_t> row = all.subspan(i * seq_len, seq_len);
    if (task == TaskKind::kMarkerDetect) {
      FillMarkerDetect(rng, vocab, row, data.labels[i]);
    } else {
      FillParity(rng, vocab, row, data.labels[i]);
    }
  }
  return data;
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::vector<int32_t> TokenizeHashing(std::string_view text,
                                     int64_t vocab_size) {
  if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
  std::vector<int32_t> ids;
  constexpr std::string_view kBlank = " \t\r\n\f\v";
  size_t pos = text.find_first_not_of(kBlank);
  while (pos != std::string_view::npos) {
    size_t end = text.find_first_of(kBlank, pos);
    if (end == std::string_view::npos) end = text.size();
    const uint64_t h = Fnv1a64(text.substr(pos, end - pos));
    ids.push_back(static_cast<int32_t>(h % static_cast<uint64_t>(vocab_size)));
    pos = text.find_first_not_of(kBlank, end);
  }
  if (ids.empty()) ids.push_back(kPadToken);
  return ids;
}

namespace {

bool ParseLabel(std::string_view field, int32_t& label) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), label);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

Dataset LoadCsvDataset(const std::string& path, int64_t vocab, int64_t seq_len,
                       int64_t classes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  Dataset data;
  data.seq_len = seq_len;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const size_t comma = line.find(',');
    int32_t label = 0;
    const bool ok = comma != std::string::npos &&
                    ParseLabel(std::string_view(line).substr(0, comma), label);
    if (!ok) {
      if (data.labels.empty() && line_no == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'label,text'");
    }
    if (label < 0 || label >= classes) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": label out of range");
    }
    std::vector<int32_t> ids =
        TokenizeHashing(std::string_view(line).substr(comma + 1), vocab);
    ids.resize(static_cast<size_t>(seq_len), kPadToken);
    data.tokens.insert(data.tokens.end(), ids.begin(), ids.end());
    data.labels.push_back(label);
  }
  if (data.labels.empty()) throw ConfigError("no rows in '" + path + "'");
  return data;
}

BatchSampler::BatchSampler(const Dataset& dataset, int64_t batch_size,
                           uint64_t seed)
    : dataset_(dataset), batch_size_(batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (dataset.size() < batch_size) {
    throw ConfigError("dataset size must be >= batch size");
  }
  std::vector<int64_t> order(static_cast<size_t>(dataset.size()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
  CounterRng rng(Mix64(seed ^ 0xBA7C4ULL));
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformBelow(i)]);
  }
  int32_t max_label = 0;
  for (int32_t label : dataset.labels) max_label = std::max(max_label, label);
  std::vector<std::vector<int64_t>> by_label(static_cast<size_t>(max_label) + 1);
  for (int64_t row : order) by_label[dataset.labels[row]].push_back(row);
  for (auto& rows : by_label) {
    if (!rows.empty()) classes_.push_back(std::move(rows));
  }
  cursors_.assign(classes_.size(), 0);
}

Batch BatchSampler::Next() {
  Batch batch;
  batch.batch_size = batch_size_;
  batch.seq_len = dataset_.seq_len;
  batch.tokens.reserve(static_cast<size_t>(batch_size_ * dataset_.seq_len));
  batch.labels.reserve(static_cast<size_t>(batch_size_));
  for (int64_t i = 0; i < batch_size_; ++i) {
    const size_t k = static_cast<size_t>(drawn_ % classes_.size());
    ++drawn_;
    const std::vector<int64_t>& rows = classes_[k];
    const int64_t row = rows[cursors_[k]];
    cursors_[k] = (cursors_[k] + 1) % rows.size();
    std::span<const int32_t> seq = dataset_.sequence(row);
    batch.tokens.insert(batch.tokens.end(), seq.begin(), seq.end());
    batch.labels.push_back(dataset_.labels[row]);
  }
  return batch;
}

}  // namespace zolab::bench
