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

#ifndef ZOLAB_RNG_H_
#define ZOLAB_RNG_H_

#include <cstdint>
#include <span>

namespace zolab {

// Counter-based random streams.
//
// Every sample is a pure function of (seed, index): the stream key is
// SplitMix64(seed) and raw word `i` is the SplitMix64 output for Weyl state
// key + (i + 1) * 0x9E3779B97F4A7C15. Normals use Box-Muller over index
// pairs: words 2j and 2j+1 give (u1, u2) in (0, 1], and normal sample 2j is
// r*cos(2*pi*u2), sample 2j+1 is r*sin(2*pi*u2) with r = sqrt(-2 ln u1).
// Random access by index is what lets a perturbation direction be
// regenerated chunk by chunk instead of stored.

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Raw 64-bit word `index` of the stream for `seed`.
constexpr uint64_t StreamWord(uint64_t seed, uint64_t index) {
  return Mix64(Mix64(seed) + index * 0x9E3779B97F4A7C15ULL);
}

// Uniform double in (0, 1] from the top 53 bits of a word.
constexpr double WordToUnit(uint64_t word) {
  return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

// Standard normal sample at `index` of the stream for `seed`.
double NormalSample(uint64_t seed, uint64_t index);

// out[k] = NormalSample(seed, start + k).
void NormalStreamFill(uint64_t seed, uint64_t start, std::span<double> out);
void NormalStreamFill(uint64_t seed, uint64_t start, std::span<float> out);

// Probe seed for (base, step, probe). Injective in (step, probe) for
// step, probe < 2^32 at fixed base.
constexpr uint64_t DeriveProbeSeed(uint64_t base, uint64_t step,
                                   uint64_t probe) {
  const uint64_t packed = (step << 32) | (probe & 0xFFFFFFFFULL);
  return Mix64(base ^ Mix64(packed));
}

// Sequential generator over a counter stream, for data generation and
// sampling where a cursor is more convenient than explicit indices.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t NextU64() { return StreamWord(seed_, cursor_++); }

  // Uniform integer in [0, bound). Rejection keeps it unbiased.
  uint64_t UniformBelow(uint64_t bound);

  // Uniform double in (0, 1].
  double NextUnit() { return WordToUnit(NextU64()); }

  double NextNormal();

  uint64_t cursor() const { return cursor_; }

 private:
  uint64_t seed_;
  uint64_t cursor_ = 0;
};

}  // namespace zolab

#endif  // ZOLAB_RNG_H_
