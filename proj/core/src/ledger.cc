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

#include "zolab/ledger.h"

#include <stdexcept>
#include <utility>

#include "zolab/errors.h"

namespace zolab {

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kWeights:
      return "weights";
    case Category::kGrads:
      return "grads";
    case Category::kOptState:
      return "optstate";
    case Category::kActivation:
      return "activation";
    case Category::kTransient:
      return "transient";
    case Category::kOther:
      return "other";
  }
  return "unknown";
}

Allocation::~Allocation() {
  if (active()) ledger_->ReleaseBytes(category_, bytes_);
}

Allocation::Allocation(Allocation&& other) noexcept
    : ledger_(std::exchange(other.ledger_, nullptr)),
      category_(other.category_),
      bytes_(std::exchange(other.bytes_, 0)),
      released_(std::exchange(other.released_, false)) {}

Allocation& Allocation::operator=(Allocation&& other) noexcept {
  if (this != &other) {
    if (active()) ledger_->ReleaseBytes(category_, bytes_);
    ledger_ = std::exchange(other.ledger_, nullptr);
    category_ = other.category_;
    bytes_ = std::exchange(other.bytes_, 0);
    released_ = std::exchange(other.released_, false);
  }
  return *this;
}

void Allocation::Release() {
  if (ledger_ == nullptr) {
    throw std::logic_error("release of an empty allocation token");
  }
  if (released_) {
    throw std::logic_error("allocation token released twice");
  }
  released_ = true;
  ledger_->ReleaseBytes(category_, bytes_);
}

void AllocationLedger::RaiseTo(std::atomic<uint64_t>& peak, uint64_t value) {
  uint64_t seen = peak.load(std::memory_order_relaxed);
  while (seen < value &&
         !peak.compare_exchange_weak(seen, value, std::memory_order_relaxed)) {
  }
}

Allocation AllocationLedger::Acquire(Category category, uint64_t bytes) {
  uint64_t total = total_.load(std::memory_order_relaxed);
  uint64_t next;
  do {
    next = total + bytes;
    if (budget_ && next > *budget_) {
      throw SimulatedOomError(bytes, total, *budget_);
    }
  } while (!total_.compare_exchange_weak(total, next,
                                         std::memory_order_acq_rel));
  const size_t c = static_cast<size_t>(category);
  const uint64_t now = current_[c].fetch_add(bytes, std::memory_order_acq_rel) +
                       bytes;
  RaiseTo(peak_[c], now);
  RaiseTo(window_peak_[c], now);
  RaiseTo(peak_total_, next);
  RaiseTo(window_peak_total_, next);
  return Allocation(this, category, bytes);
}

void AllocationLedger::ReleaseBytes(Category category, uint64_t bytes) {
  current_[static_cast<size_t>(category)].fetch_sub(bytes,
                                                   std::memory_order_acq_rel);
  total_.fetch_sub(bytes, std::memory_order_acq_rel);
}

uint64_t AllocationLedger::current(Category c) const {
  return current_[static_cast<size_t>(c)].load(std::memory_order_acquire);
}

uint64_t AllocationLedger::peak(Category c) const {
  return peak_[static_cast<size_t>(c)].load(std::memory_order_acquire);
}

uint64_t AllocationLedger::current_total() const {
  return total_.load(std::memory_order_acquire);
}

uint64_t AllocationLedger::peak_total() const {
  return peak_total_.load(std::memory_order_acquire);
}

CategoryBytes AllocationLedger::Current() const {
  CategoryBytes out;
  for (Category c : kAllCategories) out[c] = current(c);
  out.total = current_total();
  return out;
}

CategoryBytes AllocationLedger::Peaks() const {
  CategoryBytes out;
  for (Category c : kAllCategories) out[c] = peak(c);
  out.total = peak_total();
  return out;
}

void AllocationLedger::BeginWindow() {
  for (size_t c = 0; c < kNumCategories; ++c) {
    window_peak_[c].store(current_[c].load(std::memory_order_acquire),
                          std::memory_order_release);
  }
  window_peak_total_.store(total_.load(std::memory_order_acquire),
                           std::memory_order_release);
}

CategoryBytes AllocationLedger::WindowPeaks() const {
  CategoryBytes out;
  for (size_t c = 0; c < kNumCategories; ++c) {
    out.bytes[c] = window_peak_[c].load(std::memory_order_acquire);
  }
  out.total = window_peak_total_.load(std::memory_order_acquire);
  return out;
}

AllocationLedger& UntrackedLedger() {
  static AllocationLedger ledger;
  return ledger;
}

}  // namespace zolab
