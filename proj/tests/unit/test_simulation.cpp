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
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "nbuplift/coverage.hpp"
#include "nbuplift/errors.hpp"
#include "nbuplift/simulation.hpp"

using namespace nbuplift;

namespace {

std::vector<double> Ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
  return r;
}

double Pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double Spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return Pearson(Ranks(a), Ranks(b));
}

}  // namespace

TEST_CASE("covariates have unit variance and 0.2 correlation") {
  DgpSpec spec;
  spec.population_size = 50000;
  spec.seed = 3;
  const auto pop = GeneratePopulation(spec);
  REQUIRE(pop.size == 50000);
  REQUIRE(pop.covariates == 40);
  std::vector<double> c0(pop.size), c1(pop.size), c7(pop.size);
  for (std::size_t i = 0; i < pop.size; ++i) {
    c0[i] = pop.row(i)[0];
    c1[i] = pop.row(i)[1];
    c7[i] = pop.row(i)[7];
  }
  for (const auto* c : {&c0, &c1, &c7}) {
    const double m = std::accumulate(c->begin(), c->end(), 0.0) / 50000;
    double ss = 0;
    for (const double x : *c) ss += (x - m) * (x - m);
    CHECK(std::fabs(m) < 0.02);
    CHECK(std::fabs(ss / 49999 - 1.0) < 0.05);
  }
  CHECK(std::fabs(Pearson(c0, c1) - 0.2) < 0.03);
  CHECK(std::fabs(Pearson(c1, c7) - 0.2) < 0.03);
}

TEST_CASE("generation is deterministic under a seed") {
  DgpSpec spec;
  spec.population_size = 2000;
  spec.seed = 11;
  const auto a = GeneratePopulation(spec);
  const auto b = GeneratePopulation(spec);
  CHECK(a.x == b.x);
  CHECK(a.outcome == b.outcome);
  CHECK(a.treatment == b.treatment);
  spec.seed = 12;
  CHECK(GeneratePopulation(spec).x != a.x);
}

TEST_CASE("treatment share and outcome range") {
  DgpSpec spec;
  spec.population_size = 10000;
  spec.treat_ratio = 0.75;
  spec.seed = 2;
  const auto pop = GeneratePopulation(spec);
  const auto treated = std::accumulate(pop.treatment.begin(), pop.treatment.end(), 0);
  CHECK(treated == 7500);
  for (std::size_t i = 0; i < pop.size; ++i) {
    REQUIRE((pop.outcome[i] == 0.0 || pop.outcome[i] == 1.0));
    REQUIRE(pop.p_treated[i] > 0.0);
    REQUIRE(pop.p_treated[i] < 1.0);
  }
}

TEST_CASE("zero effect scale removes the uplift") {
  DgpSpec spec;
  spec.population_size = 5000;
  spec.effect_scale = 0.0;
  spec.seed = 4;
  const auto pop = GeneratePopulation(spec);
  for (std::size_t i = 0; i < pop.size; ++i) REQUIRE(pop.true_uplift(i) == 0.0);
}

TEST_CASE("invalid DGP settings are rejected") {
  DgpSpec spec;
  spec.covariates = 4;
  CHECK_THROWS_AS(ValidateDgp(spec), ArgumentError);
  spec = DgpSpec{};
  spec.treat_ratio = 1.0;
  CHECK_THROWS_AS(ValidateDgp(spec), ArgumentError);
  spec = DgpSpec{};
  spec.sigma = 0.0;
  CHECK_THROWS_AS(ValidateDgp(spec), ArgumentError);
}

TEST_CASE("S-learner recovers the ordering of a linear uplift") {
  DgpSpec spec;
  spec.form = DgpForm::kLinear;
  spec.population_size = 50000;
  spec.sigma = 0.1;
  spec.seed = 21;
  const auto train = GeneratePopulation(spec);
  const auto model = LogisticSLearner::Fit(train);
  spec.seed = 22;
  spec.population_size = 20000;
  const auto test = GeneratePopulation(spec);
  std::vector<double> pred(test.size), truth(test.size);
  for (std::size_t i = 0; i < test.size; ++i) {
    pred[i] = model.PredictUplift(test.row(i));
    truth[i] = test.true_uplift(i);
  }
  CHECK(Spearman(pred, truth) > 0.9);
  CHECK(std::isfinite(model.final_loss()));
}

TEST_CASE("built-in scorers: model_1 outranks model_2 on the oracle") {
  DgpSpec dgp;
  dgp.seed = 31;
  const auto scorers = TrainBuiltinScorers(dgp, kDefaultTrainingSize,
                                           kDefaultOracleNoiseSd, 32);
  const auto pct = DefaultPercentiles();
  const auto oracle = ComputeOracleCurves(dgp, scorers, 20, pct, 1);
  REQUIRE(oracle.grid.size() == 20);
  for (std::size_t g = 0; g < 10; ++g) {
    CHECK(oracle.mean[0][g] > oracle.mean[1][g]);
    CHECK(oracle.diff_mean[g] > 0.0);
  }
  // Every unit is selected at q = 100, so the two models coincide there.
  CHECK(oracle.diff_mean.back() == 0.0);
  CHECK(oracle.diff_se.back() == 0.0);
  CHECK(oracle.mean[0].back() == oracle.mean[1].back());
}

TEST_CASE("oracle with one replication equals a single curve") {
  DgpSpec dgp;
  dgp.population_size = 4000;
  dgp.seed = 41;
  const auto scorers = TrainBuiltinScorers(dgp, 4000, 0.1, 42);
  const auto pct = DefaultPercentiles();
  const auto oracle = ComputeOracleCurves(dgp, scorers, 1, pct, 1);

  const std::uint64_t seed = DeriveSeed(dgp.seed, StreamDomain::kOracle, 0);
  Engine pop_rng = MakeStream(seed, StreamDomain::kPopulation);
  Engine noise_rng = MakeStream(seed, StreamDomain::kScoreNoise);
  const auto pop = GeneratePopulation(dgp, pop_rng);
  const auto data = PopulationDataset(pop, ScorePopulation(scorers, pop, noise_rng));
  const auto curve = BuildCurve(data, RankByModel(data, 0), pct);
  for (std::size_t g = 0; g < curve.size(); ++g) {
    CHECK(oracle.mean[0][g] == *curve.MeanUplift(g));
    CHECK(oracle.se[0][g] == 0.0);
  }
}

TEST_CASE("two independent oracle runs agree within their standard errors") {
  DgpSpec dgp;
  dgp.seed = 51;
  const auto scorers = TrainBuiltinScorers(dgp, kDefaultTrainingSize, 0.1, 52);
  const auto pct = DefaultPercentiles();
  const auto a = ComputeOracleCurves(dgp, scorers, 60, pct, 0);
  dgp.seed = 53;
  const auto b = ComputeOracleCurves(dgp, scorers, 60, pct, 0);
  int outside = 0;
  for (std::size_t g = 0; g + 1 < a.grid.size(); ++g) {
    const double se = std::hypot(a.diff_se[g], b.diff_se[g]);
    if (std::fabs(a.diff_mean[g] - b.diff_mean[g]) > 3 * se) ++outside;
  }
  CHECK(outside <= 1);
}

TEST_CASE("scoring checks the covariate count") {
  DgpSpec dgp;
  dgp.population_size = 2000;
  dgp.seed = 61;
  const auto scorers = TrainBuiltinScorers(dgp, 2000, 0.1, 62);
  dgp.covariates = 10;
  const auto pop = GeneratePopulation(dgp);
  Engine rng(1);
  CHECK_THROWS_AS(ScorePopulation(scorers, pop, rng), ArgumentError);
  CHECK_THROWS_AS(TrainBuiltinScorers(dgp, 2000, -1.0, 1), ArgumentError);
}
