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

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "nbuplift/alias_table.hpp"
#include "nbuplift/errors.hpp"

using namespace nbuplift;

TEST_CASE("alias table reproduces its weights") {
  const std::vector<double> w = {1, 0, 3, 0.5, 2.5, 0};
  const AliasTable t(w);
  REQUIRE(t.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(t.Probability(i) == doctest::Approx(w[i] / 7.0).epsilon(1e-12));
  }
}

TEST_CASE("5:1 weights over a million draws") {
  // p = (0.2, 1.0) -> weights (5, 1).
  const std::vector<double> w = {1 / 0.2, 1 / 1.0};
  const AliasTable t(w);
  Engine rng(123);
  const int draws = 1000000;
  int first = 0;
  for (int i = 0; i < draws; ++i) first += t.Sample(rng) == 0;
  const double p = 5.0 / 6.0;
  const double sd = std::sqrt(draws * p * (1 - p));
  CHECK(std::fabs(first - draws * p) < 3 * sd);
}

TEST_CASE("zero-weight entries are never drawn") {
  const std::vector<double> w = {0, 2, 0, 1};
  const AliasTable t(w);
  Engine rng(5);
  for (int i = 0; i < 100000; ++i) {
    const auto k = t.Sample(rng);
    REQUIRE((k == 1 || k == 3));
  }
}

TEST_CASE("single entry") {
  const std::vector<double> w = {0.3};
  const AliasTable t(w);
  Engine rng(1);
  for (int i = 0; i < 100; ++i) CHECK(t.Sample(rng) == 0);
}

TEST_CASE("invalid weights are rejected") {
  CHECK_THROWS_AS(AliasTable(std::vector<double>{}), ArgumentError);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0, 0}), ArgumentError);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{1, -1}), ArgumentError);
  CHECK_THROWS_AS(
      AliasTable(std::vector<double>{1, std::numeric_limits<double>::infinity()}),
      ArgumentError);
  CHECK_THROWS_AS(
      AliasTable(std::vector<double>{std::numeric_limits<double>::quiet_NaN()}),
      ArgumentError);
}
