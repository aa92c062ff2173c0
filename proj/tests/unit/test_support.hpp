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

#ifndef NBUPLIFT_TESTS_TEST_SUPPORT_HPP_
#define NBUPLIFT_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "nbuplift/curve.hpp"
#include "nbuplift/random.hpp"

namespace nbuplift::testing {

// Exact binomial coefficient; valid while the result fits in 64 bits.
inline std::uint64_t Choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Uint128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * static_cast<Uint128>(n - k + i) / static_cast<Uint128>(i);
  }
  return static_cast<std::uint64_t>(r);
}

// Calls fn(mask) for every subset of {0..n-1} with exactly k bits set.
template <typename Fn>
void ForEachSubset(int n, int k, Fn&& fn) {
  if (k == 0) {
    fn(std::uint64_t{0});
    return;
  }
  std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (mask < limit) {
    fn(mask);
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
}

// Random dataset with `models` score columns, ids 1..n, binary outcomes.
inline Dataset RandomDataset(std::size_t n, std::size_t models, Engine& rng) {
  std::vector<std::string> names;
  for (std::size_t s = 0; s < models; ++s) {
    names.push_back("m" + std::to_string(s + 1));
  }
  std::vector<std::int64_t> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  std::vector<std::uint8_t> t(n);
  std::vector<double> y(n);
  std::vector<std::vector<double>> scores(models, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = Uniform01(rng) < 0.5 ? 1 : 0;
    y[i] = Uniform01(rng) < 0.3 + 0.2 * t[i] ? 1.0 : 0.0;
    for (auto& col : scores) col[i] = Uniform01(rng);
  }
  return Dataset::FromColumns(names, ids, t, y, scores);
}

}  // namespace nbuplift::testing

#endif  // NBUPLIFT_TESTS_TEST_SUPPORT_HPP_
