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

#ifndef NBUPLIFT_BOOTSTRAP_HPP_
#define NBUPLIFT_BOOTSTRAP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbuplift/curve.hpp"
#include "nbuplift/random.hpp"

namespace nbuplift {

struct BootstrapConfig {
  int outer_replicates = 100;  // B
  int inner_replicates = 10;   // D
  double alpha = 0.05;
  std::vector<double> percentiles = DefaultPercentiles();
  std::uint64_t seed = 0;
  int threads = 0;  // 0: NBUPLIFT_THREADS or hardware concurrency
};

void ValidateConfig(const BootstrapConfig& config);

// B median-aggregated curves per model on a shared grid.
struct CurveEnsemble {
  std::vector<GridPoint> grid;
  std::vector<std::string> model_names;
  std::vector<std::vector<UpliftCurve>> curves;  // [model][b]
  std::vector<std::string> warnings;

  std::size_t model_count() const { return curves.size(); }
  std::size_t replicates() const { return curves.empty() ? 0 : curves[0].size(); }
};

// n equal-weight draws with replacement from members [0, n).
std::vector<std::size_t> OuterResample(std::size_t n, Engine& rng);

// Pseudo-population of `population_size` draws over the members listed in
// `outer` (repeats allowed), each member weighted by multiplicity / p_i.
// Returns member indices. Throws ConfigurationError when a p_i is missing,
// non-positive, or above 1.
std::vector<std::size_t> InnerResample(std::span<const std::size_t> outer,
                                       std::span<const double> p_inclusion,
                                       std::int64_t population_size,
                                       Engine& rng);

// Median of the present values; missing when none are present.
Gain MedianSkippingMissing(std::span<const Gain> values);

// Linear-interpolation quantile of sorted data: h = (n - 1) * prob, blending
// the two neighbouring order statistics. prob = 0.5 on even n gives the mean
// of the two central values.
double QuantileSorted(std::span<const double> sorted, double prob);

// Nested bootstrap over a chosen sample. `sample` holds the chosen members
// (all observed) with their scores; p_inclusion[i] belongs to sample row i;
// `population_size` is N. Every model is evaluated on the same
// pseudo-populations, re-ranked by stored scores. Results do not depend on
// config.threads.
CurveEnsemble NestedBootstrap(const Dataset& sample,
                              std::span<const double> p_inclusion,
                              std::int64_t population_size,
                              const BootstrapConfig& config);

// Pointwise alpha/2, 0.5, 1 - alpha/2 quantiles of one model's ensemble.
// Points missing in more than half the replicates are flagged missing and a
// warning is recorded.
CurveBand SummarizeBand(const CurveEnsemble& ensemble, std::size_t model,
                        double alpha);

// Band of the paired difference model_a - model_b, formed within each outer
// replicate before taking quantiles.
CurveBand DifferenceBand(const CurveEnsemble& ensemble, std::size_t model_a,
                         std::size_t model_b, double alpha);

// Divides every band value by its selection size k.
CurveBand ToMeanUpliftScale(CurveBand band);

}  // namespace nbuplift

#endif  // NBUPLIFT_BOOTSTRAP_HPP_
