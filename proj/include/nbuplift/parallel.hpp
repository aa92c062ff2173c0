// Copyright 2026 The nbuplift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NBUPLIFT_PARALLEL_HPP_
#define NBUPLIFT_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace nbuplift {

// Resolves a thread-count hint: positive values are used as-is; zero falls
// back to NBUPLIFT_THREADS, then to hardware concurrency.
int ResolveThreadCount(int hint);

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically; callers must write results into per-index slots so
// the outcome does not depend on scheduling. The first exception thrown by
// any item is rethrown after all workers stop.
void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& body);

}  // namespace nbuplift

#endif  // NBUPLIFT_PARALLEL_HPP_
