// Copyright 2026 The mecast Authors
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

// Index-parallel loops. Bodies write into per-index slots; any reduction is
// done afterwards by the caller in index order, so results never depend on
// the thread count.

#pragma once

#include <cstddef>
#include <functional>

namespace mecast {

// Process-wide worker count used by parallel_for. 1 runs inline.
int worker_threads();
// n <= 0 selects std::thread::hardware_concurrency().
void set_worker_threads(int n);

// Calls body(i) for i in [0, count). Exceptions thrown by bodies are
// rethrown on the calling thread (the one with the lowest index wins).
// Calls made from inside a body run inline.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// RAII override of the worker count.
class ScopedWorkerThreads {
 public:
  explicit ScopedWorkerThreads(int n) : saved_(worker_threads()) { set_worker_threads(n); }
  ~ScopedWorkerThreads() { set_worker_threads(saved_); }
  ScopedWorkerThreads(const ScopedWorkerThreads&) = delete;
  ScopedWorkerThreads& operator=(const ScopedWorkerThreads&) = delete;

 private:
  int saved_;
};

}  // namespace mecast
