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

#ifndef NBUPLIFT_COVERAGE_HPP_
#define NBUPLIFT_COVERAGE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbuplift/bootstrap.hpp"
#include "nbuplift/design.hpp"
#include "nbuplift/simulation.hpp"

namespace nbuplift {

// One row of the scenario grid plus everything needed to run it.
struct ScenarioSpec {
  int id = 0;
  double rank_percent = 0.0;  // share of N taken by the ranked step
  double srs_percent = 0.0;   // share of N taken by the random step
  std::int64_t population_size = 20000;
  double treat_ratio = 0.5;
  double sigma = 1.0;
  int replications = 100;  // K
  BootstrapConfig bootstrap;
  std::uint64_t seed = 0;
};

// Ranked / random percentages for scenario ids 0..7.
struct ScenarioRow {
  int id;
  double rank_percent;
  double srs_percent;
};
std::span<const ScenarioRow> ScenarioTable();

// Scenario `id` at the given size and ratio, desk-scale defaults elsewhere.
ScenarioSpec MakeScenario(int id, std::int64_t population_size = 20000,
                          double treat_ratio = 0.5);

// S0 = 1 design for the scenario. Throws ConfigurationError when a
// percentage does not give a whole number of units.
CheckedDesign ScenarioDesign(const ScenarioSpec& scenario);

DgpSpec ScenarioDgp(const ScenarioSpec& scenario);

// Monte Carlo ground truth on the mean-uplift scale.
struct OracleCurves {
  std::vector<GridPoint> grid;
  std::vector<std::vector<double>> mean;  // [model][point]
  std::vector<std::vector<double>> se;    // standard error of the mean
  std::vector<double> diff_mean;          // model_1 - model_2
  std::vector<double> diff_se;
  int replications = 0;
  int skipped = 0;  // populations with an empty arm at some point
};

// Averages full-information mean uplift over `replications` fresh
// populations drawn from `dgp` (seed streams under dgp.seed).
OracleCurves ComputeOracleCurves(const DgpSpec& dgp,
                                 const BuiltinScorers& scorers,
                                 int replications,
                                 std::span<const double> percentiles,
                                 int threads = 0);

struct CoverageRow {
  double percentile = 0.0;
  std::int64_t population_size = 0;
  double model1_cov = 0.0;
  double model2_cov = 0.0;
  double diff_cov = 0.0;
  double diff_bias = 0.0;
  double diff_se = 0.0;
  double model1_bias = 0.0;
  double model1_se = 0.0;
  double model2_bias = 0.0;
  double model2_se = 0.0;
  // Replications whose band had no value at this point; they count as not
  // covering and are left out of bias and SE.
  int model1_missing = 0;
  int model2_missing = 0;
  int diff_missing = 0;
};

struct CoverageReport {
  ScenarioSpec scenario;
  std::vector<CoverageRow> rows;
  int completed = 0;
  int excluded = 0;
  std::vector<std::string> failures;
  double runtime_seconds = 0.0;
};

// K replications of generate -> allocate -> sample (model_1 ranks) ->
// inclusion table -> nested bootstrap -> bands, compared with the oracle on
// the mean-uplift scale. A missing band point counts as a miss. Replications
// whose pipeline throws are excluded and counted; 5% or more excluded raises
// EstimationError.
CoverageReport RunCoverageExperiment(const ScenarioSpec& scenario,
                                     const BuiltinScorers& scorers,
                                     const OracleCurves& oracle,
                                     int threads = 0);

}  // namespace nbuplift

#endif  // NBUPLIFT_COVERAGE_HPP_
