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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "nbuplift/design.hpp"
#include "nbuplift/errors.hpp"
#include "nbuplift/inclusion.hpp"
#include "test_support.hpp"

using namespace nbuplift;

namespace {

CheckedDesign Single(std::int64_t N, std::int64_t n, std::int64_t nr) {
  return ValidateDesign({N, n, nr, {N - nr}});
}

// Exact inclusion probability of the unit at rank m, by enumerating every
// step-one subset (units are identified with their ranks 1..N).
double EnumerateSingle(int N, int n, int nr, int m) {
  std::uint64_t hits = 0, total = 0;
  testing::ForEachSubset(N, nr, [&](std::uint64_t srs) {
    ++total;
    const std::uint64_t me = std::uint64_t{1} << (m - 1);
    if (srs & me) {
      ++hits;
      return;
    }
    // Better-ranked units still available for the ranked step.
    const std::uint64_t better = me - 1;
    const int left = std::popcount(better & ~srs);
    if (left < n - nr) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Exact inclusion probabilities for S0 = 2 over every step-one subset and
// every split of the remainder into blocks of sizes sub[0], sub[1].
std::vector<double> EnumerateTwoModels(int N, int n, int nr,
                                       const std::vector<int>& sub,
                                       const std::vector<std::vector<int>>& rank) {
  const CheckedDesign d = ValidateDesign({N, n, nr, {sub[0], sub[1]}});
  const auto q0 = d.rank_quota(0), q1 = d.rank_quota(1);
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(N), 0);
  std::uint64_t total = 0;
  testing::ForEachSubset(N, nr, [&](std::uint64_t srs) {
    std::vector<int> rest;
    for (int u = 0; u < N; ++u) {
      if (!(srs >> u & 1)) rest.push_back(u);
    }
    const int R = static_cast<int>(rest.size());
    testing::ForEachSubset(R, sub[0], [&](std::uint64_t first) {
      ++total;
      std::vector<int> b0, b1;
      for (int j = 0; j < R; ++j) (first >> j & 1 ? b0 : b1).push_back(rest[j]);
      auto by = [&](int s) {
        return [&, s](int a, int b) { return rank[s][a] < rank[s][b]; };
      };
      std::sort(b0.begin(), b0.end(), by(0));
      std::sort(b1.begin(), b1.end(), by(1));
      for (int u = 0; u < N; ++u) {
        if (srs >> u & 1) ++hits[u];
      }
      for (std::int64_t j = 0; j < q0; ++j) ++hits[b0[j]];
      for (std::int64_t j = 0; j < q1; ++j) ++hits[b1[j]];
    });
  });
  std::vector<double> p(hits.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = static_cast<double>(hits[i]) / static_cast<double>(total);
  }
  return p;
}

}  // namespace

TEST_CASE("single-model boundary cases") {
  const auto d = Single(100, 20, 10);
  CHECK(InclusionProbSingle(60, d) == 0.1);
  CHECK(InclusionProbSingle(5, d) == 1.0);
  CHECK(InclusionProbSingle(10, d) == 1.0);
  CHECK(InclusionProbSingle(21, d) == 0.1);
  CHECK(InclusionProbSingle(20, d) > 0.1);
  CHECK(InclusionProbSingle(11, d) < 1.0);
  CHECK_THROWS_AS(InclusionProbSingle(0, d), ArgumentError);
  CHECK_THROWS_AS(InclusionProbSingle(101, d), ArgumentError);
}

TEST_CASE("single-model value on N = 12, n = 10, n_r = 4") {
  const auto d = Single(12, 10, 4);
  const double exact = 97.0 / 165.0;
  CHECK(EnumerateSingle(12, 10, 4, 10) == doctest::Approx(exact).epsilon(1e-15));
  CHECK(InclusionProbSingle(10, d) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(InclusionProbSingleTailForm(10, d) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("single-model probabilities match enumeration on small designs") {
  for (const auto& [N, n, nr] : std::vector<std::array<int, 3>>{
           {12, 6, 3}, {12, 10, 4}, {10, 5, 1}, {14, 9, 5}, {8, 8, 3}, {9, 4, 4}}) {
    const auto d = Single(N, n, nr);
    for (int m = 1; m <= N; ++m) {
      const double want = EnumerateSingle(N, n, nr, m);
      CHECK(std::fabs(InclusionProbSingle(m, d) - want) < 1e-12);
      CHECK(std::fabs(InclusionProbSingleTailForm(m, d) - want) < 1e-12);
    }
  }
}

TEST_CASE("the two single-model routes agree and are monotone") {
  for (std::int64_t N = 20; N <= 200; N += 30) {
    for (std::int64_t nr = 1; nr < N / 2; nr += 7) {
      for (std::int64_t n = nr; n <= N; n += 11) {
        const auto d = Single(N, n, nr);
        double prev = 1.0;
        for (std::int64_t m = 1; m <= N; ++m) {
          const double a = InclusionProbSingle(m, d);
          const double b = InclusionProbSingleTailForm(m, d);
          REQUIRE(std::fabs(a - b) <= 1e-12 * std::max(a, b));
          REQUIRE(a <= prev + 1e-15);
          REQUIRE(a >= static_cast<double>(nr) / static_cast<double>(N));
          prev = a;
        }
      }
    }
  }
}

TEST_CASE("two-model probabilities match exhaustive enumeration") {
  Engine rng(99);
  const int N = 12, n = 6, nr = 2;
  for (const auto& sub : std::vector<std::vector<int>>{{5, 5}, {10, 0}, {0, 10}}) {
    std::vector<std::vector<int>> rank(2, std::vector<int>(N));
    for (auto& r : rank) {
      std::iota(r.begin(), r.end(), 1);
      std::shuffle(r.begin(), r.end(), rng);
    }
    const auto want = EnumerateTwoModels(N, n, nr, sub, rank);
    const auto d = ValidateDesign({N, n, nr, {sub[0], sub[1]}});
    double total = 0;
    for (int u = 0; u < N; ++u) {
      const std::vector<std::int64_t> m = {rank[0][u], rank[1][u]};
      const double got = InclusionProbMulti(m, d);
      CHECK(std::fabs(got - want[u]) < 1e-12);
      total += got;
    }
    CHECK(total == doctest::Approx(n).epsilon(1e-12));
  }
}

TEST_CASE("multi-model reduces to the single-model formula for S0 = 1") {
  const auto d = Single(150, 40, 12);
  for (std::int64_t m = 1; m <= 150; ++m) {
    const std::vector<std::int64_t> r = {m};
    CHECK(std::fabs(InclusionProbMulti(r, d) - InclusionProbSingle(m, d)) < 1e-12);
  }
}

TEST_CASE("multi-model extreme cases") {
  const auto d = ValidateDesign({20, 8, 2, {9, 9}});
  CHECK(d.rank_quota(0) == 3);
  const std::vector<std::int64_t> top = {1, 3};
  CHECK(InclusionProbMulti(top, d) == 1.0);
  const std::vector<std::int64_t> bottom = {20, 19};  // > N - N' + n' = 14
  CHECK(InclusionProbMulti(bottom, d) == doctest::Approx(0.1).epsilon(1e-15));
  const std::vector<std::int64_t> wrong = {1};
  CHECK_THROWS_AS(InclusionProbMulti(wrong, d), ArgumentError);
}

TEST_CASE("inclusion table sums to n") {
  Engine rng(4);
  const auto data = testing::RandomDataset(2000, 2, rng);
  const std::vector<RankAssignment> one = {RankByModel(data, 0)};
  const auto t1 = ComputeInclusionTable(one, Single(2000, 300, 40));
  CHECK(std::accumulate(t1.p.begin(), t1.p.end(), 0.0) == doctest::Approx(300));

  const std::vector<RankAssignment> two = {RankByModel(data, 0), RankByModel(data, 1)};
  const auto d2 = ValidateDesign({2000, 400, 100, {950, 950}});
  const auto t2 = ComputeInclusionTable(two, d2, 2);
  CHECK(std::accumulate(t2.p.begin(), t2.p.end(), 0.0) == doctest::Approx(400));
  for (const double p : t2.p) {
    CHECK(p >= 0.05 - 1e-15);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("pure random design gives n / N everywhere") {
  Engine rng(8);
  const auto data = testing::RandomDataset(300, 1, rng);
  const std::vector<RankAssignment> r = {RankByModel(data, 0)};
  const auto t = ComputeInclusionTable(r, Single(300, 30, 30));
  for (const double p : t.p) CHECK(p == doctest::Approx(0.1).epsilon(1e-15));
  const std::vector<RankAssignment> none;
  CHECK_THROWS_AS(ComputeInclusionTable(none, Single(300, 30, 30)), ArgumentError);
}

TEST_CASE("top-ranked unit is always included") {
  const auto d = Single(1000, 50, 10);
  CHECK(InclusionProbSingle(1, d) == 1.0);
}
