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

#ifndef NBUPLIFT_DESIGN_HPP_
#define NBUPLIFT_DESIGN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nbuplift/curve.hpp"
#include "nbuplift/random.hpp"

namespace nbuplift {

// Two-step scheme: a simple random sample of `srs_size` units, then the top
// units by model s inside each random sub-universe s of the remainder.
struct SamplingDesign {
  std::int64_t population_size = 0;  // N
  std::int64_t sample_size = 0;      // n
  std::int64_t srs_size = 0;         // n_r
  std::vector<std::int64_t> sub_sizes;  // one per ranking model, sums to N - n_r
};

// A design whose invariants have been checked. Only ValidateDesign creates
// one, so holding a CheckedDesign means the quotas are integral.
class CheckedDesign {
 public:
  const SamplingDesign& design() const { return design_; }
  std::int64_t population_size() const { return design_.population_size; }
  std::int64_t sample_size() const { return design_.sample_size; }
  std::int64_t srs_size() const { return design_.srs_size; }
  std::size_t ranking_models() const { return design_.sub_sizes.size(); }
  std::int64_t sub_size(std::size_t s) const { return design_.sub_sizes.at(s); }
  // n'_s = (n - n_r) N'_s / (N - n_r).
  std::int64_t rank_quota(std::size_t s) const { return quotas_.at(s); }
  std::span<const std::int64_t> rank_quotas() const { return quotas_; }

 private:
  friend CheckedDesign ValidateDesign(const SamplingDesign& design);
  SamplingDesign design_;
  std::vector<std::int64_t> quotas_;
};

// Throws ConfigurationError when n_r = 0, sizes are inconsistent, or a rank
// quota is not an integer (the message suggests a compatible block size).
CheckedDesign ValidateDesign(const SamplingDesign& design);

// Splits N - n_r as evenly as possible over S0 blocks, earlier blocks taking
// the remainder.
std::vector<std::int64_t> EqualSubSizes(std::int64_t population_size,
                                        std::int64_t srs_size,
                                        std::size_t ranking_models);

// Exactly round(ratio * N) treated units, chosen uniformly without
// replacement. Returns the 0/1 arm per position.
std::vector<std::uint8_t> AllocateTreatment(std::size_t population_size,
                                            double treat_ratio, Engine& rng);

enum class Provenance { kSrs, kRanked };

struct ChosenMember {
  std::size_t position = 0;  // row in the population dataset
  std::int64_t id = 0;
  Provenance provenance = Provenance::kSrs;
  int sub_universe = -1;  // ranked members only
  double p_inclusion = 0.0;
};

struct ChosenSet {
  std::vector<ChosenMember> members;
  SamplingDesign design;

  std::vector<std::size_t> positions() const;
  std::size_t size() const { return members.size(); }
};

// Draws one chosen set. ranks[s] ranks the whole population under the model
// used for sub-universe s. Inclusion probabilities are left at zero; the
// inclusion module fills them.
ChosenSet TwoStepSample(const Dataset& units, const CheckedDesign& design,
                        std::span<const RankAssignment> ranks, Engine& rng);

}  // namespace nbuplift

#endif  // NBUPLIFT_DESIGN_HPP_
