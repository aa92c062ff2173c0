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

#ifndef NBUPLIFT_ALIAS_TABLE_HPP_
#define NBUPLIFT_ALIAS_TABLE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nbuplift/random.hpp"

namespace nbuplift {

// Walker/Vose alias table: O(n) build, O(1) draws with probability
// proportional to the build weights.
class AliasTable {
 public:
  // Weights must be finite, non-negative, and not all zero.
  explicit AliasTable(std::span<const double> weights);

  // One 64-bit draw supplies both the column (high half of r * n) and the
  // coin (low half), so each sample costs a single engine call.
  std::size_t Sample(Engine& rng) const {
    const Uint128 m =
        static_cast<Uint128>(rng()) * prob_.size();
    const auto column = static_cast<std::size_t>(m >> 64);
    const double coin =
        static_cast<double>(static_cast<std::uint64_t>(m) >> 11) * 0x1.0p-53;
    return coin < prob_[column] ? column : alias_[column];
  }

  std::size_t size() const { return prob_.size(); }

  // Probability that Sample returns i, reconstructed from the table.
  double Probability(std::size_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace nbuplift

#endif  // NBUPLIFT_ALIAS_TABLE_HPP_
