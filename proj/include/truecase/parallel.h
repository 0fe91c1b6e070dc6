// Copyright 2026 The Truecase Authors.
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

#ifndef TRUECASE_PARALLEL_H_
#define TRUECASE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace truecase {

// Worker count: TRUECASE_THREADS if set to a positive integer, capped at
// the hardware concurrency; otherwise the hardware concurrency.
size_t DefaultThreads();

// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index runs
// exactly once; the first exception thrown is rethrown on the caller.
void ParallelFor(size_t n, size_t threads,
                 const std::function<void(size_t)>& fn);

}  // namespace truecase

#endif  // TRUECASE_PARALLEL_H_
