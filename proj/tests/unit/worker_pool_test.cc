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

#include <atomic>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gtest/gtest.h"

namespace zolab {
namespace {

TEST(WorkerPoolTest, RunsEveryTaskOnce) {
  WorkerPool pool(3);
  EXPECT_EQ(pool.size(), 3u);
  std::vector<std::atomic<int>> hits(50);
  const auto errors = pool.Run(50, [&](size_t task, size_t) { ++hits[task]; });
  ASSERT_EQ(errors.size(), 50u);
  for (size_t i = 0; i < hits.size(); ++i) {
    EXPECT_EQ(hits[i].load(), 1) << i;
    EXPECT_FALSE(errors[i]);
  }
}

TEST(WorkerPoolTest, TaskRunsOnWorkerTaskModSize) {
  WorkerPool pool(4);
  std::vector<size_t> worker_of(17);
  pool.Run(17, [&](size_t task, size_t worker) { worker_of[task] = worker; });
  for (size_t i = 0; i < worker_of.size(); ++i) EXPECT_EQ(worker_of[i], i % 4);
}

TEST(WorkerPoolTest, SameWorkerUsesOneThread) {
  WorkerPool pool(2);
  std::vector<std::thread::id> ids(8);
  pool.Run(8, [&](size_t task, size_t) {
    ids[task] = std::this_thread::get_id();
  });
  for (size_t i = 2; i < ids.size(); ++i) EXPECT_EQ(ids[i], ids[i % 2]);
  EXPECT_NE(ids[0], ids[1]);
}

TEST(WorkerPoolTest, ExceptionsAreCapturedPerTask) {
  WorkerPool pool(2);
  const auto errors = pool.Run(5, [](size_t task, size_t) {
    if (task == 3) throw std::runtime_error("boom");
  });
  for (size_t i = 0; i < errors.size(); ++i) {
    EXPECT_EQ(static_cast<bool>(errors[i]), i == 3) << i;
  }
  EXPECT_THROW(std::rethrow_exception(errors[3]), std::runtime_error);
}

TEST(WorkerPoolTest, ReusableAcrossBatchesAndEmptyBatch) {
  WorkerPool pool(3);
  EXPECT_TRUE(pool.Run(0, [](size_t, size_t) {}).empty());
  std::atomic<int> total{0};
  for (int round = 0; round < 20; ++round) {
    pool.Run(7, [&](size_t, size_t) { ++total; });
  }
  EXPECT_EQ(total.load(), 140);
}

}  // namespace
}  // namespace zolab
