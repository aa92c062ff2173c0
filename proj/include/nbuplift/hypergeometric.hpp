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

#ifndef NBUPLIFT_HYPERGEOMETRIC_HPP_
#define NBUPLIFT_HYPERGEOMETRIC_HPP_

#include <cstdint>

namespace nbuplift {

// Hypergeometric(population, successes, draws): the number of successes in
// `draws` draws without replacement from `population` items of which
// `successes` are successes.
struct HypergeomParams {
  std::int64_t population = 0;
  std::int64_t successes = 0;
  std::int64_t draws = 0;
};

std::int64_t SupportMin(const HypergeomParams& p);
std::int64_t SupportMax(const HypergeomParams& p);

// log P(X = k). Exactly -infinity outside the support. Evaluated through
// Loader's saddle-point decomposition, so it stays accurate and finite for
// populations in the millions. Throws ArgumentError on invalid parameters.
double HypergeomLogPmf(const HypergeomParams& p, std::int64_t k);

// P(X <= upper), clamped to [0, 1].
double HypergeomCdf(const HypergeomParams& p, std::int64_t upper);

// P(X > k), clamped to [0, 1].
double HypergeomSf(const HypergeomParams& p, std::int64_t k);

}  // namespace nbuplift

#endif  // NBUPLIFT_HYPERGEOMETRIC_HPP_
