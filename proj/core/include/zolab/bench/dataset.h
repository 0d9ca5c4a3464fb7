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

#ifndef ZOLAB_BENCH_DATASET_H_
#define ZOLAB_BENCH_DATASET_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zolab/model.h"

namespace zolab::bench {

enum class TaskKind { kMarkerDetect, kParity, kCsv };

std::string_view TaskName(TaskKind task);
// Throws ConfigError.
TaskKind ParseTask(std::string_view name);

// Tokens that make a marker-detect sequence positive.
inline constexpr std::array<int32_t, 5> kMarkerTokens = {1, 2, 3, 4, 5};
inline constexpr int32_t kPadToken = 0;

// Fixed-length labelled sequences. Not tracked by any ledger: the data stands
// in for an input pipeline, not for model state.
struct Dataset {
  int64_t seq_len = 0;
  std::vector<int32_t> tokens;  // size() x seq_len, row-major
  std::vector<int32_t> labels;

  int64_t size() const { return static_cast<int64_t>(labels.size()); }
  std::span<const int32_t> sequence(int64_t i) const {
    return std::span<const int32_t>(tokens).subspan(i * seq_len, seq_len);
  }
};

bool ContainsMarker(std::span<const int32_t> sequence);

// marker-detect: label ~ Bernoulli(1/2); positives carry between s/4 and s/2
// marker tokens (at least one) at random positions, possibly overlapping.
// Every other token is drawn from [6, vocab).
// parity: tokens uniform in [1, vocab), label = number of odd tokens mod 2.
// Deterministic in seed. Throws ConfigError for sizes < 1, vocab too small
// for the task, or kCsv (use LoadCsvDataset).
Dataset GenerateDataset(TaskKind task, int64_t size, int64_t vocab,
                        int64_t seq_len, uint64_t seed);

// Whitespace split, FNV-1a 64 of each word, modulo vocab_size. Empty or
// all-blank text gives a single pad token. Throws ConfigError if
// vocab_size < 2.
std::vector<int32_t> TokenizeHashing(std::string_view text, int64_t vocab_size);

uint64_t Fnv1a64(std::string_view bytes);

// Lines "label,text"; a first line whose label is not an integer is treated
// as a header, blank lines and lines starting with '#' are skipped. Text is
// hashed, then truncated or padded with the pad token to seq_len.
Dataset LoadCsvDataset(const std::string& path, int64_t vocab, int64_t seq_len,
                       int64_t classes);

// Class-balanced: rows are drawn round-robin over the labels present, each
// label cycling through its own seed-shuffled rows. The round-robin position
// carries over between calls, so odd batch sizes stay balanced on average.
class BatchSampler {
 public:
  BatchSampler(const Dataset& dataset, int64_t batch_size, uint64_t seed);

  Batch Next();

 private:
  const Dataset& dataset_;
  int64_t batch_size_;
  std::vector<std::vector<int64_t>> classes_;
  std::vector<size_t> cursors_;
  uint64_t drawn_ = 0;
};

}  // namespace zolab::bench

#endif  // ZOLAB_BENCH_DATASET_H_
