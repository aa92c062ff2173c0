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

#include "nbuplift/coverage.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "nbuplift/errors.hpp"
#include "nbuplift/inclusion.hpp"
#include "nbuplift/parallel.hpp"

namespace nbuplift {
namespace {

constexpr std::array<ScenarioRow, 8> kScenarios = {{
    {0, 5.0, 1.0},
    {1, 10.0, 5.0},
    {2, 5.0, 0.5},
    {3, 10.0, 1.0},
    {4, 5.0, 5.0},
    {5, 1.0, 0.1},
    {6, 5.0, 10.0},
    {7, 1.0, 10.0},
}};

std::int64_t WholeUnits(double percent, std::int64_t population,
                        const char* what) {
  const double exact = percent * static_cast<double>(population) / 100.0;
  const double rounded = std::round(exact);
  if (std::fabs(exact - rounded) > 1e-6) {
    std::ostringstream msg;
    msg << what << " " << percent << "% of N=" << population
        << " is not a whole number of units";
    throw ConfigurationError(msg.str());
  }
  return static_cast<std::int64_t>(rounded);
}

struct MeanSe {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSe MeanAndSd(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (const double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (const double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

bool Covers(const BandPoint& p, double truth) {
  return p.lower <= truth && truth <= p.upper;
}

// Per grid point: median point estimate (NaN when the band point is
// missing) and whether the band contains the oracle value.
struct ReplicationResult {
  bool ok = false;
  std::string failure;
  std::array<std::vector<double>, 3> median;  // model_1, model_2, diff
  std::array<std::vector<std::uint8_t>, 3> covered;
};

}  // namespace

std::span<const ScenarioRow> ScenarioTable() { return kScenarios; }

ScenarioSpec MakeScenario(int id, std::int64_t population_size,
                          double treat_ratio) {
  for (const auto& row : kScenarios) {
    if (row.id == id) {
      ScenarioSpec spec;
      spec.id = id;
      spec.rank_percent = row.rank_percent;
      spec.srs_percent = row.srs_percent;
      spec.population_size = population_size;
      spec.treat_ratio = treat_ratio;
      return spec;
    }
  }
  throw ConfigurationError("unknown scenario id " + std::to_string(id) +
                           " (expected 0-7)");
}

CheckedDesign ScenarioDesign(const ScenarioSpec& scenario) {
  const std::int64_t N = scenario.population_size;
  const std::int64_t nr = WholeUnits(scenario.srs_percent, N, "random step");
  const std::int64_t ranked = WholeUnits(scenario.rank_percent, N, "ranked step");
  SamplingDesign d;
  d.population_size = N;
  d.srs_size = nr;
  d.sample_size = nr + ranked;
  d.sub_sizes = {N - nr};
  return ValidateDesign(d);
}

DgpSpec ScenarioDgp(const ScenarioSpec& scenario) {
  DgpSpec dgp;
  dgp.population_size = scenario.population_size;
  dgp.sigma = scenario.sigma;
  dgp.treat_ratio = scenario.treat_ratio;
  dgp.seed = scenario.seed;
  return dgp;
}

OracleCurves ComputeOracleCurves(const DgpSpec& dgp,
                                 const BuiltinScorers& scorers,
                                 int replications,
                                 std::span<const double> percentiles,
                                 int threads) {
  if (replications < 1) throw ArgumentError("oracle needs R >= 1");
  ValidateDgp(dgp);
  const auto R = static_cast<std::size_t>(replications);
  const auto grid = MakeGrid(percentiles, dgp.population_size);
  const std::size_t G = grid.size();

  // values[r][model][g]; model 2 is the difference.
  std::vector<std::array<std::vector<double>, 3>> values(R);
  std::vector<std::uint8_t> usable(R, 0);

  ParallelFor(R, ResolveThreadCount(threads), [&](std::size_t r) {
    const std::uint64_t seed = DeriveSeed(dgp.seed, StreamDomain::kOracle, r);
    Engine pop_rng = MakeStream(seed, StreamDomain::kPopulation);
    Engine noise_rng = MakeStream(seed, StreamDomain::kScoreNoise);
    const Population pop = GeneratePopulation(dgp, pop_rng);
    const Dataset data =
        PopulationDataset(pop, ScorePopulation(scorers, pop, noise_rng));
    std::array<UpliftCurve, 2> curves;
    for (std::size_t s = 0; s < 2; ++s) {
      curves[s] = BuildCurve(data, RankByModel(data, s), percentiles);
    }
    auto& out = values[r];
    for (auto& v : out) v.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
      const Gain a = curves[0].MeanUplift(g);
      const Gain b = curves[1].MeanUplift(g);
      if (!a || !b) return;
      out[0][g] = *a;
      out[1][g] = *b;
      out[2][g] = *a - *b;
    }
    usable[r] = 1;
  });

  OracleCurves oracle;
  oracle.grid = grid;
  oracle.mean.assign(2, std::vector<double>(G));
  oracle.se.assign(2, std::vector<double>(G));
  oracle.diff_mean.resize(G);
  oracle.diff_se.resize(G);
  std::vector<double> column;
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t g = 0; g < G; ++g) {
      column.clear();
      for (std::size_t r = 0; r < R; ++r) {
        if (usable[r]) column.push_back(values[r][m][g]);
      }
      const MeanSe ms = MeanAndSd(column);
      const double se =
          column.empty() ? 0.0 : ms.sd / std::sqrt(static_cast<double>(column.size()));
      if (m < 2) {
        oracle.mean[m][g] = ms.mean;
        oracle.se[m][g] = se;
      } else {
        oracle.diff_mean[g] = ms.mean;
        oracle.diff_se[g] = se;
      }
    }
  }
  for (const auto u : usable) {
    if (u) {
      ++oracle.replications;
    } else {
      ++oracle.skipped;
    }
  }
  if (oracle.replications == 0) {
    throw EstimationError("no oracle population produced a complete curve");
  }
  return oracle;
}

CoverageReport RunCoverageExperiment(const ScenarioSpec& scenario,
                                     const BuiltinScorers& scorers,
                                     const OracleCurves& oracle,
                                     int threads) {
  const auto start = std::chrono::steady_clock::now();
  if (scenario.replications < 1) throw ArgumentError("K must be >= 1");
  ValidateConfig(scenario.bootstrap);
  const CheckedDesign design = ScenarioDesign(scenario);
  const DgpSpec dgp = ScenarioDgp(scenario);
  const auto grid = MakeGrid(scenario.bootstrap.percentiles, scenario.population_size);
  if (grid.size() != oracle.grid.size()) {
    throw ConfigurationError("oracle grid does not match the scenario grid");
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g].k != oracle.grid[g].k) {
      throw ConfigurationError("oracle was computed for a different population size");
    }
  }
  const std::size_t G = grid.size();
  const auto K = static_cast<std::size_t>(scenario.replications);
  std::vector<ReplicationResult> results(K);
  const double alpha = scenario.bootstrap.alpha;

  ParallelFor(K, ResolveThreadCount(threads), [&](std::size_t rep) {
    ReplicationResult& res = results[rep];
    const std::uint64_t seed =
        DeriveSeed(scenario.seed, StreamDomain::kReplication, rep);
    try {
      Engine pop_rng = MakeStream(seed, StreamDomain::kPopulation);
      Engine noise_rng = MakeStream(seed, StreamDomain::kScoreNoise);
      Engine sample_rng = MakeStream(seed, StreamDomain::kSampling);
      const Population pop = GeneratePopulation(dgp, pop_rng);
      const Dataset data =
          PopulationDataset(pop, ScorePopulation(scorers, pop, noise_rng));
      const std::vector<RankAssignment> ranks = {RankByModel(data, 0)};
      const InclusionTable table = ComputeInclusionTable(ranks, design);
      ChosenSet chosen = TwoStepSample(data, design, ranks, sample_rng);
      AssignInclusion(chosen, table);

      const Dataset sample = data.Subset(chosen.positions());
      std::vector<double> p;
      p.reserve(chosen.size());
      for (const auto& m : chosen.members) p.push_back(m.p_inclusion);

      BootstrapConfig cfg = scenario.bootstrap;
      cfg.seed = DeriveSeed(seed, StreamDomain::kBootstrap, 0);
      cfg.threads = 1;
      const CurveEnsemble ensemble =
          NestedBootstrap(sample, p, scenario.population_size, cfg);
      const std::array<CurveBand, 3> bands = {
          ToMeanUpliftScale(SummarizeBand(ensemble, 0, alpha)),
          ToMeanUpliftScale(SummarizeBand(ensemble, 1, alpha)),
          ToMeanUpliftScale(DifferenceBand(ensemble, 0, 1, alpha)),
      };
      for (std::size_t m = 0; m < 3; ++m) {
        res.median[m].resize(G);
        res.covered[m].resize(G);
        for (std::size_t g = 0; g < G; ++g) {
          const BandPoint& pt = bands[m].points[g];
          if (pt.missing) {
            // No band, so nothing covers the oracle here.
            res.median[m][g] = std::numeric_limits<double>::quiet_NaN();
            res.covered[m][g] = 0;
            continue;
          }
          const double truth = m < 2 ? oracle.mean[m][g] : oracle.diff_mean[g];
          res.median[m][g] = pt.median;
          res.covered[m][g] = Covers(pt, truth) ? 1 : 0;
        }
      }
      res.ok = true;
    } catch (const Error& e) {
      res.failure = "replication " + std::to_string(rep) + ": " + e.what();
    }
  });

  CoverageReport report;
  report.scenario = scenario;
  for (const auto& r : results) {
    if (r.ok) {
      ++report.completed;
    } else {
      ++report.excluded;
      report.failures.push_back(r.failure);
    }
  }
  if (20 * report.excluded >= scenario.replications) {
    std::ostringstream msg;
    msg << report.excluded << " of " << scenario.replications
        << " replications failed band construction";
    if (!report.failures.empty()) msg << "; first: " << report.failures.front();
    throw EstimationError(msg.str());
  }

  std::vector<double> medians;
  for (std::size_t g = 0; g < G; ++g) {
    CoverageRow row;
    row.percentile = grid[g].percentile;
    row.population_size = scenario.population_size;
    std::array<double, 3> cov{}, bias{}, se{};
    std::array<int, 3> missing{};
    for (std::size_t m = 0; m < 3; ++m) {
      medians.clear();
      std::size_t hits = 0;
      for (const auto& r : results) {
        if (!r.ok) continue;
        hits += r.covered[m][g];
        if (std::isnan(r.median[m][g])) {
          ++missing[m];
        } else {
          medians.push_back(r.median[m][g]);
        }
      }
      const double truth = m < 2 ? oracle.mean[m][g] : oracle.diff_mean[g];
      const MeanSe ms = MeanAndSd(medians);
      cov[m] = static_cast<double>(hits) / static_cast<double>(report.completed);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      bias[m] = medians.empty() ? nan : ms.mean - truth;
      se[m] = medians.empty() ? nan : ms.sd;
    }
    row.model1_cov = cov[0];
    row.model2_cov = cov[1];
    row.diff_cov = cov[2];
    row.model1_bias = bias[0];
    row.model2_bias = bias[1];
    row.diff_bias = bias[2];
    row.model1_se = se[0];
    row.model2_se = se[1];
    row.diff_se = se[2];
    row.model1_missing = missing[0];
    row.model2_missing = missing[1];
    row.diff_missing = missing[2];
    report.rows.push_back(row);
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace nbuplift
