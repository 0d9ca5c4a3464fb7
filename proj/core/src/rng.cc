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

#include "zolab/rng.h"

#include <cmath>
#include <cstddef>
#include <numbers>

namespace zolab {
namespace {

struct NormalPair {
  double even;
  double odd;
};

NormalPair BoxMuller(uint64_t key, uint64_t pair) {
  // Stream key is Mix64(seed); inline StreamWord to hash the seed once.
  const uint64_t w1 = Mix64(key + (2 * pair) * 0x9E3779B97F4A7C15ULL);
  const uint64_t w2 = Mix64(key + (2 * pair + 1) * 0x9E3779B97F4A7C15ULL);
  const double r = std::sqrt(-2.0 * std::log(WordToUnit(w1)));
  const double angle = 2.0 * std::numbers::pi * WordToUnit(w2);
  return {r * std::cos(angle), r * std::sin(angle)};
}

template <typename T>
void FillImpl(uint64_t seed, uint64_t start, std::span<T> out) {
  const uint64_t key = Mix64(seed);
  size_t k = 0;
  const size_t n = out.size();
  if (n == 0) return;
  uint64_t index = start;
  if (index & 1) {
    out[k++] = static_cast<T>(BoxMuller(key, index >> 1).odd);
    ++index;
  }
  while (k + 1 < n) {
    const NormalPair p = BoxMuller(key, index >> 1);
    out[k] = static_cast<T>(p.even);
    out[k + 1] = static_cast<T>(p.odd);
    k += 2;
    index += 2;
  }
  if (k < n) out[k] = static_cast<T>(BoxMuller(key, index >> 1).even);
}

}  // namespace

double NormalSample(uint64_t seed, uint64_t index) {
  const NormalPair p = BoxMuller(Mix64(seed), index >> 1);
  return (index & 1) ? p.odd : p.even;
}

void NormalStreamFill(uint64_t seed, uint64_t start, std::span<double> out) {
  FillImpl(seed, start, out);
}

void NormalStreamFill(uint64_t seed, uint64_t start, std::span<float> out) {
  FillImpl(seed, start, out);
}

uint64_t CounterRng::UniformBelow(uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound representable; reject the tail.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  uint64_t word;
  do {
    word = NextU64();
  } while (word >= limit);
  return word % bound;
}

double CounterRng::NextNormal() {
  const double u1 = NextUnit();
  const double u2 = NextUnit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace zolab
