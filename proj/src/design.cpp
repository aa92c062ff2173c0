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

#include "nbuplift/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "nbuplift/errors.hpp"

namespace nbuplift {
namespace {

std::string Join(std::span<const std::int64_t> values) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ", ";
    os << values[i];
  }
  os << ']';
  return os.str();
}

}  // namespace

CheckedDesign ValidateDesign(const SamplingDesign& d) {
  const std::int64_t N = d.population_size;
  const std::int64_t n = d.sample_size;
  const std::int64_t nr = d.srs_size;
  if (nr <= 0) {
    throw ConfigurationError(
        "n_r must be positive: the random step is what gives every unit a "
        "non-zero inclusion probability");
  }
  if (n < nr) throw ConfigurationError("sample size n must be at least n_r");
  if (N < n) throw ConfigurationError("sample size n exceeds population size N");
  if (d.sub_sizes.empty()) {
    throw ConfigurationError("at least one ranking model (S0 >= 1) is required");
  }
  const std::int64_t remaining = N - nr;
  std::int64_t sum = 0;
  for (const std::int64_t size : d.sub_sizes) {
    if (size < 0) throw ConfigurationError("sub-universe sizes must be >= 0");
    sum += size;
  }
  if (sum != remaining) {
    throw ConfigurationError("sub-universe sizes " + Join(d.sub_sizes) +
                             " sum to " + std::to_string(sum) +
                             ", expected N - n_r = " +
                             std::to_string(remaining));
  }

  CheckedDesign out;
  out.design_ = d;
  out.quotas_.reserve(d.sub_sizes.size());
  const std::int64_t ranked = n - nr;
  for (const std::int64_t size : d.sub_sizes) {
    if (remaining == 0) {
      out.quotas_.push_back(0);
      continue;
    }
    const auto numerator =
        static_cast<Int128>(ranked) * static_cast<Int128>(size);
    if (numerator % remaining != 0) {
      const std::int64_t step = remaining / std::gcd(ranked, remaining);
      std::ostringstream msg;
      msg << "rank quota (n - n_r) * N'_s / (N - n_r) is not an integer for "
          << "sub-universe sizes " << Join(d.sub_sizes)
          << "; each N'_s must be a multiple of " << step;
      const auto equal = EqualSubSizes(N, nr, d.sub_sizes.size());
      if (std::all_of(equal.begin(), equal.end(),
                      [&](std::int64_t s) { return s % step == 0; })) {
        msg << ", e.g. " << Join(equal);
      }
      throw ConfigurationError(msg.str());
    }
    out.quotas_.push_back(static_cast<std::int64_t>(numerator / remaining));
  }
  return out;
}

std::vector<std::int64_t> EqualSubSizes(std::int64_t population_size,
                                        std::int64_t srs_size,
                                        std::size_t ranking_models) {
  if (ranking_models == 0) throw ArgumentError("need at least one block");
  const std::int64_t remaining = population_size - srs_size;
  const auto s0 = static_cast<std::int64_t>(ranking_models);
  std::vector<std::int64_t> sizes(ranking_models, remaining / s0);
  for (std::int64_t i = 0; i < remaining % s0; ++i) ++sizes[i];
  return sizes;
}

std::vector<std::uint8_t> AllocateTreatment(std::size_t population_size,
                                            double treat_ratio, Engine& rng) {
  if (!(treat_ratio > 0.0 && treat_ratio < 1.0)) {
    throw ArgumentError("treatment ratio must lie in (0, 1)");
  }
  const auto treated = static_cast<std::size_t>(
      std::llround(treat_ratio * static_cast<double>(population_size)));
  std::vector<std::size_t> perm(population_size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::uint8_t> arm(population_size, 0);
  for (std::size_t i = 0; i < treated; ++i) {
    const std::size_t j = i + UniformIndex(rng, population_size - i);
    std::swap(perm[i], perm[j]);
    arm[perm[i]] = 1;
  }
  return arm;
}

std::vector<std::size_t> ChosenSet::positions() const {
  std::vector<std::size_t> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.position);
  return out;
}

ChosenSet TwoStepSample(const Dataset& units, const CheckedDesign& design,
                        std::span<const RankAssignment> ranks, Engine& rng) {
  const auto N = static_cast<std::size_t>(design.population_size());
  if (units.size() != N) {
    throw ArgumentError("population has " + std::to_string(units.size()) +
                        " units but the design expects " + std::to_string(N));
  }
  if (ranks.size() != design.ranking_models()) {
    throw ArgumentError("need one rank assignment per ranking model");
  }
  for (const auto& r : ranks) {
    if (r.ranks.size() != N || r.order.size() != N) {
      throw ArgumentError("rank assignment does not cover the population");
    }
  }
  const auto ids = units.ids();
  const auto nr = static_cast<std::size_t>(design.srs_size());

  ChosenSet out;
  out.design = design.design();
  out.members.reserve(static_cast<std::size_t>(design.sample_size()));

  // Step 1: partial Fisher-Yates; perm[0, nr) is the simple random sample.
  std::vector<std::size_t> perm(N);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < nr; ++i) {
    const std::size_t j = i + UniformIndex(rng, N - i);
    std::swap(perm[i], perm[j]);
    out.members.push_back({perm[i], ids[perm[i]], Provenance::kSrs, -1, 0.0});
  }

  if (design.ranking_models() == 1) {
    // One block holds every survivor: walk the ranking, skipping SRS units.
    std::vector<std::uint8_t> in_srs(N, 0);
    for (std::size_t i = 0; i < nr; ++i) in_srs[perm[i]] = 1;
    auto quota = static_cast<std::size_t>(design.rank_quota(0));
    for (std::size_t r = 0; r < N && quota > 0; ++r) {
      const std::size_t pos = ranks[0].order[r];
      if (in_srs[pos]) continue;
      out.members.push_back({pos, ids[pos], Provenance::kRanked, 0, 0.0});
      --quota;
    }
    return out;
  }

  // Step 2: finish the shuffle, cut the survivors into blocks of N'_s, and
  // keep the top n'_s of each block under that block's model.
  for (std::size_t i = nr; i + 1 < N; ++i) {
    const std::size_t j = i + UniformIndex(rng, N - i);
    std::swap(perm[i], perm[j]);
  }
  std::size_t offset = nr;
  for (std::size_t s = 0; s < design.ranking_models(); ++s) {
    const auto size = static_cast<std::size_t>(design.sub_size(s));
    const auto quota = static_cast<std::size_t>(design.rank_quota(s));
    auto first = perm.begin() + static_cast<std::ptrdiff_t>(offset);
    auto last = first + static_cast<std::ptrdiff_t>(size);
    const auto& rank = ranks[s].ranks;
    auto by_rank = [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; };
    auto cut = first + static_cast<std::ptrdiff_t>(quota);
    std::nth_element(first, cut, last, by_rank);
    std::sort(first, cut, by_rank);
    for (auto it = first; it != cut; ++it) {
      out.members.push_back(
          {*it, ids[*it], Provenance::kRanked, static_cast<int>(s), 0.0});
    }
    offset += size;
  }
  return out;
}

}  // namespace nbuplift
