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

#include "nbuplift/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nbuplift/alias_table.hpp"
#include "nbuplift/errors.hpp"
#include "nbuplift/parallel.hpp"

namespace nbuplift {
namespace {

// Inverse-probability sampler over the distinct members of one outer
// resample. Built once per outer replicate and shared by its inner draws.
class InverseProbabilitySampler {
 public:
  InverseProbabilitySampler(std::span<const std::size_t> outer,
                            std::span<const double> p_inclusion) {
    std::vector<std::int64_t> multiplicity(p_inclusion.size(), 0);
    for (const std::size_t i : outer) {
      if (i >= p_inclusion.size()) {
        throw ArgumentError("outer resample refers to an unknown member");
      }
      ++multiplicity[i];
    }
    std::vector<double> weights;
    for (std::size_t i = 0; i < multiplicity.size(); ++i) {
      if (multiplicity[i] == 0) continue;
      const double p = p_inclusion[i];
      if (!(p > 0.0 && p <= 1.0)) {
        throw ConfigurationError(
            "inclusion probability missing or outside (0, 1] for member " +
            std::to_string(i));
      }
      members_.push_back(i);
      weights.push_back(static_cast<double>(multiplicity[i]) / p);
    }
    if (members_.empty()) throw ArgumentError("empty outer resample");
    table_.emplace(weights);
  }

  std::size_t Draw(Engine& rng) const { return members_[table_->Sample(rng)]; }

 private:
  std::vector<std::size_t> members_;
  std::optional<AliasTable> table_;
};

struct BandStats {
  BandPoint point;
  std::size_t missing = 0;
};

BandStats Summarize(std::vector<double>& present, std::size_t missing,
                    double alpha) {
  BandStats out;
  out.missing = missing;
  const std::size_t total = present.size() + missing;
  if (present.empty() || 2 * missing > total) {
    out.point.missing = true;
    return out;
  }
  std::sort(present.begin(), present.end());
  out.point.lower = QuantileSorted(present, alpha / 2.0);
  out.point.median = QuantileSorted(present, 0.5);
  out.point.upper = QuantileSorted(present, 1.0 - alpha / 2.0);
  return out;
}

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("alpha must lie in (0, 1)");
  }
}

void CheckModel(const CurveEnsemble& ensemble, std::size_t model) {
  if (model >= ensemble.model_count()) {
    throw ConfigurationError("model index " + std::to_string(model) +
                             " not in ensemble");
  }
}

std::string MissingWarning(const std::string& what, const GridPoint& g,
                           std::size_t missing, std::size_t total) {
  std::ostringstream os;
  os << what << ": percentile " << g.percentile << " missing in " << missing
     << " of " << total << " outer replicates; no estimate reported";
  return os.str();
}

}  // namespace

void ValidateConfig(const BootstrapConfig& config) {
  if (config.outer_replicates < 1) throw ArgumentError("B must be >= 1");
  if (config.inner_replicates < 1) throw ArgumentError("D must be >= 1");
  CheckAlpha(config.alpha);
  if (config.percentiles.empty()) throw ArgumentError("empty percentile grid");
}

std::vector<std::size_t> OuterResample(std::size_t n, Engine& rng) {
  std::vector<std::size_t> out(n);
  for (auto& v : out) v = UniformIndex(rng, n);
  return out;
}

std::vector<std::size_t> InnerResample(std::span<const std::size_t> outer,
                                       std::span<const double> p_inclusion,
                                       std::int64_t population_size,
                                       Engine& rng) {
  if (population_size < 0) throw ArgumentError("negative population size");
  const InverseProbabilitySampler sampler(outer, p_inclusion);
  std::vector<std::size_t> out(static_cast<std::size_t>(population_size));
  for (auto& v : out) v = sampler.Draw(rng);
  return out;
}

Gain MedianSkippingMissing(std::span<const Gain> values) {
  std::vector<double> present;
  present.reserve(values.size());
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) return std::nullopt;
  std::sort(present.begin(), present.end());
  return QuantileSorted(present, 0.5);
}

double QuantileSorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw ArgumentError("quantile of empty data");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw ArgumentError("quantile probability outside [0, 1]");
  }
  const double h = static_cast<double>(sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CurveEnsemble NestedBootstrap(const Dataset& sample,
                              std::span<const double> p_inclusion,
                              std::int64_t population_size,
                              const BootstrapConfig& config) {
  ValidateConfig(config);
  const std::size_t n = sample.size();
  if (n == 0) throw ArgumentError("empty chosen sample");
  if (sample.model_count() == 0) throw ArgumentError("no score columns");
  if (p_inclusion.size() != n) {
    throw ConfigurationError("need one inclusion probability per sample row");
  }
  if (!sample.fully_observed()) {
    throw ConfigurationError(
        "every chosen member must have an observed outcome");
  }
  if (population_size < static_cast<std::int64_t>(n)) {
    throw ArgumentError("population size is smaller than the sample");
  }

  const std::size_t models = sample.model_count();
  const auto B = static_cast<std::size_t>(config.outer_replicates);
  const auto D = static_cast<std::size_t>(config.inner_replicates);

  CurveEnsemble ensemble;
  ensemble.grid = MakeGrid(config.percentiles, population_size);
  ensemble.model_names = sample.model_names();
  ensemble.curves.assign(models, std::vector<UpliftCurve>(B));

  // Pseudo-population members are copies of sample rows, so ranking a
  // pseudo-population is the sample's ranking with multiplicities.
  std::vector<std::vector<std::size_t>> orders(models);
  for (std::size_t s = 0; s < models; ++s) {
    orders[s] = RankOrder(sample.scores(s), sample.ids());
  }
  const auto treatment = sample.treatment();
  const auto outcome = sample.outcome();
  const std::size_t G = ensemble.grid.size();

  ParallelFor(B, ResolveThreadCount(config.threads), [&](std::size_t b) {
    Engine rng = MakeStream(config.seed, StreamDomain::kBootstrap, b);
    const auto outer = OuterResample(n, rng);
    const InverseProbabilitySampler sampler(outer, p_inclusion);

    // inner[s][g][d]
    std::vector<std::vector<std::vector<Gain>>> inner(
        models, std::vector<std::vector<Gain>>(G, std::vector<Gain>(D)));
    std::vector<std::int64_t> counts(n);
    for (std::size_t d = 0; d < D; ++d) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::int64_t draw = 0; draw < population_size; ++draw) {
        ++counts[sampler.Draw(rng)];
      }
      for (std::size_t s = 0; s < models; ++s) {
        const auto curve = BuildCurveFromCounts(orders[s], counts, treatment,
                                                outcome, ensemble.grid);
        for (std::size_t g = 0; g < G; ++g) inner[s][g][d] = curve.gains[g];
      }
    }
    for (std::size_t s = 0; s < models; ++s) {
      UpliftCurve& agg = ensemble.curves[s][b];
      agg.grid = ensemble.grid;
      agg.gains.resize(G);
      for (std::size_t g = 0; g < G; ++g) {
        agg.gains[g] = MedianSkippingMissing(inner[s][g]);
      }
    }
  });

  for (std::size_t s = 0; s < models; ++s) {
    for (std::size_t g = 0; g < G; ++g) {
      std::size_t missing = 0;
      for (std::size_t b = 0; b < B; ++b) {
        if (!ensemble.curves[s][b].gains[g]) ++missing;
      }
      if (2 * missing > B) {
        ensemble.warnings.push_back(MissingWarning(
            ensemble.model_names[s], ensemble.grid[g], missing, B));
      }
    }
  }
  return ensemble;
}

CurveBand SummarizeBand(const CurveEnsemble& ensemble, std::size_t model,
                        double alpha) {
  CheckAlpha(alpha);
  CheckModel(ensemble, model);
  CurveBand band;
  band.grid = ensemble.grid;
  band.alpha = alpha;
  const auto& curves = ensemble.curves[model];
  std::vector<double> present;
  for (std::size_t g = 0; g < ensemble.grid.size(); ++g) {
    present.clear();
    std::size_t missing = 0;
    for (const auto& c : curves) {
      if (c.gains[g]) {
        present.push_back(*c.gains[g]);
      } else {
        ++missing;
      }
    }
    const auto stats = Summarize(present, missing, alpha);
    if (stats.point.missing) {
      band.warnings.push_back(MissingWarning(ensemble.model_names[model],
                                             ensemble.grid[g], missing,
                                             curves.size()));
    }
    band.points.push_back(stats.point);
  }
  return band;
}

CurveBand DifferenceBand(const CurveEnsemble& ensemble, std::size_t model_a,
                         std::size_t model_b, double alpha) {
  CheckAlpha(alpha);
  CheckModel(ensemble, model_a);
  CheckModel(ensemble, model_b);
  CurveBand band;
  band.grid = ensemble.grid;
  band.alpha = alpha;
  const auto& a = ensemble.curves[model_a];
  const auto& b = ensemble.curves[model_b];
  const std::string label =
      ensemble.model_names[model_a] + " - " + ensemble.model_names[model_b];
  std::vector<double> present;
  for (std::size_t g = 0; g < ensemble.grid.size(); ++g) {
    present.clear();
    std::size_t missing = 0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (a[r].gains[g] && b[r].gains[g]) {
        present.push_back(*a[r].gains[g] - *b[r].gains[g]);
      } else {
        ++missing;
      }
    }
    const auto stats = Summarize(present, missing, alpha);
    if (stats.point.missing) {
      band.warnings.push_back(
          MissingWarning(label, ensemble.grid[g], missing, a.size()));
    }
    band.points.push_back(stats.point);
  }
  return band;
}

CurveBand ToMeanUpliftScale(CurveBand band) {
  for (std::size_t g = 0; g < band.points.size(); ++g) {
    const double k = static_cast<double>(band.grid[g].k);
    auto& p = band.points[g];
    p.lower /= k;
    p.median /= k;
    p.upper /= k;
  }
  return band;
}

}  // namespace nbuplift
