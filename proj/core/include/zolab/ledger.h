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

#ifndef ZOLAB_LEDGER_H_
#define ZOLAB_LEDGER_H_

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace zolab {

enum class Category : uint8_t {
  kWeights = 0,
  kGrads,
  kOptState,
  kActivation,
  kTransient,
  kOther,
};

inline constexpr size_t kNumCategories = 6;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kWeights,    Category::kGrads,     Category::kOptState,
    Category::kActivation, Category::kTransient, Category::kOther};

std::string_view CategoryName(Category category);

// Per-category byte counts plus their sum.
struct CategoryBytes {
  std::array<uint64_t, kNumCategories> bytes{};

  uint64_t& operator[](Category c) { return bytes[static_cast<size_t>(c)]; }
  uint64_t operator[](Category c) const {
    return bytes[static_cast<size_t>(c)];
  }
  // For peaks this is the high-water mark of the running total, which can be
  // smaller than the sum of per-category peaks.
  uint64_t total = 0;

  friend bool operator==(const CategoryBytes&, const CategoryBytes&) = default;
};

class AllocationLedger;

// Move-only token for bytes held in a ledger. Released on destruction;
// releasing twice explicitly is a logic error.
class Allocation {
 public:
  Allocation() = default;
  ~Allocation();

  Allocation(const Allocation&) = delete;
  Allocation& operator=(const Allocation&) = delete;
  Allocation(Allocation&& other) noexcept;
  Allocation& operator=(Allocation&& other) noexcept;

  // Throws std::logic_error if already released.
  void Release();

  bool active() const { return ledger_ != nullptr && !released_; }
  Category category() const { return category_; }
  uint64_t bytes() const { return bytes_; }
  AllocationLedger* ledger() const { return ledger_; }

 private:
  friend class AllocationLedger;
  Allocation(AllocationLedger* ledger, Category category, uint64_t bytes)
      : ledger_(ledger), category_(category), bytes_(bytes) {}

  AllocationLedger* ledger_ = nullptr;
  Category category_ = Category::kOther;
  uint64_t bytes_ = 0;
  bool released_ = false;
};

// Tracks current and high-water bytes per category for every numeric buffer
// acquired through it. Counters are lock-free; with a simulated budget set,
// an acquisition that would push the running total past it throws
// SimulatedOomError and leaves every counter unchanged.
//
// Two peak views are kept: run peaks, monotone for the ledger's lifetime, and
// window peaks, reset by BeginWindow() to the current values so a caller can
// attribute peaks to one training step.
class AllocationLedger {
 public:
  explicit AllocationLedger(std::optional<uint64_t> budget = std::nullopt)
      : budget_(budget) {}

  AllocationLedger(const AllocationLedger&) = delete;
  AllocationLedger& operator=(const AllocationLedger&) = delete;

  Allocation Acquire(Category category, uint64_t bytes);
  void Release(Allocation& token) { token.Release(); }

  uint64_t current(Category c) const;
  uint64_t peak(Category c) const;
  uint64_t current_total() const;
  uint64_t peak_total() const;

  CategoryBytes Current() const;
  CategoryBytes Peaks() const;

  void BeginWindow();
  CategoryBytes WindowPeaks() const;

  std::optional<uint64_t> budget() const { return budget_; }

 private:
  friend class Allocation;
  void ReleaseBytes(Category category, uint64_t bytes);

  static void RaiseTo(std::atomic<uint64_t>& peak, uint64_t value);

  std::optional<uint64_t> budget_;
  std::array<std::atomic<uint64_t>, kNumCategories> current_{};
  std::array<std::atomic<uint64_t>, kNumCategories> peak_{};
  std::array<std::atomic<uint64_t>, kNumCategories> window_peak_{};
  std::atomic<uint64_t> total_{0};
  std::atomic<uint64_t> peak_total_{0};
  std::atomic<uint64_t> window_peak_total_{0};
};

// Ledger for callers that do not care about accounting (quick scripts, some
// tests). Unbudgeted, shared, never reset.
AllocationLedger& UntrackedLedger();

// Numeric array whose bytes are charged to a ledger for its lifetime. The
// ledger is charged before the memory is allocated, so a simulated OOM never
// leaves a half-built buffer behind.
template <typename T>
class TrackedBuffer {
 public:
  TrackedBuffer() = default;
  TrackedBuffer(AllocationLedger& ledger, Category category, size_t size)
      : token_(ledger.Acquire(category, size * sizeof(T))), data_(size) {}

  TrackedBuffer(TrackedBuffer&&) noexcept = default;
  TrackedBuffer& operator=(TrackedBuffer&&) noexcept = default;

  // Copies charge the same ledger under `category`.
  TrackedBuffer Clone(Category category) const {
    TrackedBuffer copy(*token_.ledger(), category, data_.size());
    copy.data_ = data_;
    return copy;
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  Category category() const { return token_.category(); }
  AllocationLedger* ledger() const { return token_.ledger(); }

  // Frees the memory and returns its bytes to the ledger.
  void Reset() {
    std::vector<T>().swap(data_);
    token_ = Allocation();
  }

 private:
  Allocation token_;
  std::vector<T> data_;
};

}  // namespace zolab

#endif  // ZOLAB_LEDGER_H_
