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

#include "nbuplift/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nbuplift/errors.hpp"
#include "nbuplift/hypergeometric.hpp"
#include "nbuplift/parallel.hpp"

namespace nbuplift {
namespace {

void CheckRank(std::int64_t rank, std::int64_t population) {
  if (rank < 1 || rank > population) {
    throw ArgumentError("rank " + std::to_string(rank) + " outside [1, " +
                        std::to_string(population) + "]");
  }
}

void CheckSingleModel(const CheckedDesign& design) {
  if (design.ranking_models() != 1) {
    throw ArgumentError("single-model inclusion needs a design with S0 = 1");
  }
}

// Neumaier-compensated sum.
double StableSum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

double InclusionProbSingle(std::int64_t rank, const CheckedDesign& design) {
  CheckSingleModel(design);
  const std::int64_t N = design.population_size();
  const std::int64_t n = design.sample_size();
  const std::int64_t nr = design.srs_size();
  CheckRank(rank, N);
  const double base = static_cast<double>(nr) / static_cast<double>(N);
  if (rank > n) return base;
  if (rank <= n - nr) return 1.0;
  const HypergeomParams better_in_srs{N - 1, rank - 1, nr};
  const double p_ranked = HypergeomSf(better_in_srs, rank - (n - nr) - 1);
  return std::min(1.0, base + (1.0 - base) * p_ranked);
}

double InclusionProbSingleTailForm(std::int64_t rank,
                                   const CheckedDesign& design) {
  CheckSingleModel(design);
  const std::int64_t N = design.population_size();
  const std::int64_t n = design.sample_size();
  const std::int64_t nr = design.srs_size();
  CheckRank(rank, N);
  const double base = static_cast<double>(nr) / static_cast<double>(N);
  if (rank > n) return base;
  if (rank <= n - nr) return 1.0;
  const HypergeomParams better_left{N - 1, rank - 1, N - 1 - nr};
  const double p_ranked = HypergeomCdf(better_left, n - nr - 1);
  return std::min(1.0, base + (1.0 - base) * p_ranked);
}

double InclusionProbMulti(std::span<const std::int64_t> ranks,
                          const CheckedDesign& design) {
  const std::size_t s0 = design.ranking_models();
  if (ranks.size() != s0) {
    throw ArgumentError("expected " + std::to_string(s0) + " ranks, got " +
                        std::to_string(ranks.size()));
  }
  const std::int64_t N = design.population_size();
  const double dN = static_cast<double>(N);
  for (const std::int64_t m : ranks) CheckRank(m, N);

  bool always_ranked = true;
  for (std::size_t s = 0; s < s0; ++s) {
    if (ranks[s] > design.rank_quota(s)) always_ranked = false;
  }
  if (always_ranked) return 1.0;

  double p = static_cast<double>(design.srs_size()) / dN;
  for (std::size_t s = 0; s < s0; ++s) {
    const std::int64_t m = ranks[s];
    const std::int64_t block = design.sub_size(s);
    const std::int64_t quota = design.rank_quota(s);
    if (block == 0) continue;
    // P(not in step 1 and assigned to block s) = N'_s / N.
    const double in_block = static_cast<double>(block) / dN;
    if (m <= quota) {
      p += in_block;
    } else if (m <= N - block + quota) {
      // The block's other N'_s - 1 members are a uniform subset of the
      // remaining N - 1 units; at most n'_s - 1 of them may outrank m.
      const HypergeomParams better_in_block{N - 1, m - 1, block - 1};
      p += in_block * HypergeomCdf(better_in_block, quota - 1);
    }
  }
  return std::min(1.0, p);
}

InclusionTable ComputeInclusionTable(std::span<const RankAssignment> ranks,
                                     const CheckedDesign& design,
                                     int threads) {
  const auto N = static_cast<std::size_t>(design.population_size());
  if (ranks.size() != design.ranking_models()) {
    throw ArgumentError("need one rank assignment per ranking model");
  }
  for (const auto& r : ranks) {
    if (r.ranks.size() != N) {
      throw ArgumentError("rank assignment does not cover the population");
    }
  }

  InclusionTable table;
  table.design = design.design();
  table.p.resize(N);

  if (design.ranking_models() == 1) {
    // Only ranks in (n - n_r, n] need the hypergeometric tail; evaluate each
    // once and share it across units.
    const std::int64_t n = design.sample_size();
    const std::int64_t nr = design.srs_size();
    const std::int64_t first_mid = n - nr + 1;
    std::vector<double> mid(static_cast<std::size_t>(nr));
    ParallelFor(mid.size(), threads, [&](std::size_t i) {
      mid[i] = InclusionProbSingle(first_mid + static_cast<std::int64_t>(i),
                                   design);
    });
    const double base =
        static_cast<double>(nr) / static_cast<double>(design.population_size());
    for (std::size_t pos = 0; pos < N; ++pos) {
      const std::int64_t m = ranks[0].ranks[pos];
      if (m < first_mid) {
        table.p[pos] = 1.0;
      } else if (m > n) {
        table.p[pos] = base;
      } else {
        table.p[pos] = mid[static_cast<std::size_t>(m - first_mid)];
      }
    }
  } else {
    const std::size_t s0 = design.ranking_models();
    ParallelFor(N, threads, [&](std::size_t pos) {
      std::vector<std::int64_t> unit_ranks(s0);
      for (std::size_t s = 0; s < s0; ++s) unit_ranks[s] = ranks[s].ranks[pos];
      table.p[pos] = InclusionProbMulti(unit_ranks, design);
    });
  }

  const double total = StableSum(table.p);
  const double expected = static_cast<double>(design.sample_size());
  if (std::fabs(total - expected) > 1e-9 * expected) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "inclusion probabilities sum to " << total << ", expected n = "
        << design.sample_size();
    throw ConsistencyError(msg.str());
  }
  return table;
}

void AssignInclusion(ChosenSet& chosen, const InclusionTable& table) {
  for (auto& m : chosen.members) {
    if (m.position >= table.p.size()) {
      throw ArgumentError("chosen member outside the inclusion table");
    }
    m.p_inclusion = table.p[m.position];
  }
}

}  // namespace nbuplift
