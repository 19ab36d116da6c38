// Copyright 2026 The evgrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evgrid/common.h"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace evgrid {

void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t count =
      std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, n);
  if (count == 1) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + count - 1) / count;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace evgrid
