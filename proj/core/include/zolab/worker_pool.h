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

#ifndef ZOLAB_WORKER_POOL_H_
#define ZOLAB_WORKER_POOL_H_

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace zolab {

// Fixed set of threads that run batches of indexed tasks. Task i always runs
// on worker i % size(), so per-worker state can be indexed by worker id.
class WorkerPool {
 public:
  using Task = std::function<void(size_t task, size_t worker)>;

  explicit WorkerPool(size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  size_t size() const { return worker_count_; }

  // Runs tasks [0, count) and blocks until all finish. Returns one exception
  // slot per task (null when the task succeeded).
  std::vector<std::exception_ptr> Run(size_t count, const Task& task);

 private:
  void WorkerLoop(size_t worker);

  size_t worker_count_;
  std::vector<std::jthread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const Task* task_ = nullptr;
  size_t count_ = 0;
  size_t generation_ = 0;
  size_t pending_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace zolab

#endif  // ZOLAB_WORKER_POOL_H_
