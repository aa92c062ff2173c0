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

#ifndef NBUPLIFT_INCLUSION_HPP_
#define NBUPLIFT_INCLUSION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "nbuplift/curve.hpp"
#include "nbuplift/design.hpp"

namespace nbuplift {

// First-order inclusion probability of the unit at model rank `rank` when a
// single model drives the ranked step (S0 = 1):
//   rank > n            -> n_r / N
//   rank <= n - n_r     -> 1
//   otherwise           -> n_r / N + (1 - n_r / N) P(J >= rank - (n - n_r)),
// where J ~ Hypergeom(N - 1, rank - 1, n_r) counts better-ranked units that
// the random step took.
double InclusionProbSingle(std::int64_t rank, const CheckedDesign& design);

// Same quantity through the complementary count: better-ranked units left
// for the ranked step, K ~ Hypergeom(N - 1, rank - 1, N - 1 - n_r), must not
// exceed n - n_r - 1. Kept as an independent route for cross-checking.
double InclusionProbSingleTailForm(std::int64_t rank,
                                   const CheckedDesign& design);

// Inclusion probability for S0 >= 1 ranking models; ranks[s] is the unit's
// rank under the model of sub-universe s.
double InclusionProbMulti(std::span<const std::int64_t> ranks,
                          const CheckedDesign& design);

struct InclusionTable {
  std::vector<double> p;  // by population position
  SamplingDesign design;
};

// Per-unit probabilities for the whole population. Throws ConsistencyError if
// they do not sum to n within 1e-9 * n.
InclusionTable ComputeInclusionTable(std::span<const RankAssignment> ranks,
                                     const CheckedDesign& design,
                                     int threads = 1);

// Copies table probabilities onto the chosen members.
void AssignInclusion(ChosenSet& chosen, const InclusionTable& table);

}  // namespace nbuplift

#endif  // NBUPLIFT_INCLUSION_HPP_
