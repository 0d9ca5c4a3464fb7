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

#include "zolab/worker_pool.h"

#include <utility>

namespace zolab {

WorkerPool::WorkerPool(size_t workers)
    : worker_count_(workers == 0 ? 1 : workers) {
  threads_.reserve(worker_count_);
  for (size_t w = 0; w < worker_count_; ++w) {
    threads_.emplace_back([this, w] { WorkerLoop(w); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  threads_.clear();
}

std::vector<std::exception_ptr> WorkerPool::Run(size_t count,
                                                const Task& task) {
  std::unique_lock<std::mutex> lock(mu_);
  task_ = &task;
  count_ = count;
  errors_.assign(count, nullptr);
  pending_ = worker_count_;
  ++generation_;
  start_cv_.notify_all();
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  task_ = nullptr;
  return std::exchange(errors_, {});
}

void WorkerPool::WorkerLoop(size_t worker) {
  size_t seen = 0;
  for (;;) {
    const Task* task;
    size_t count;
    {
      std::unique_lock<std::mutex> lock(mu_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      task = task_;
      count = count_;
    }
    for (size_t i = worker; i < count; i += worker_count_) {
      try {
        (*task)(i, worker);
      } catch (...) {
        errors_[i] = std::current_exception();
      }
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }
}

}  // namespace zolab
