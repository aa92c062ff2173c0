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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "nbuplift/bootstrap.hpp"
#include "nbuplift/curve.hpp"
#include "nbuplift/design.hpp"
#include "nbuplift/errors.hpp"
#include "nbuplift/hypergeometric.hpp"
#include "nbuplift/inclusion.hpp"
#include "nbuplift/simulation.hpp"

namespace py = pybind11;
using namespace nbuplift;

namespace {

std::vector<std::int64_t> DefaultIds(std::size_t n, const std::optional<std::vector<std::int64_t>>& ids) {
  if (ids) return *ids;
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::int64_t>(i) + 1;
  return out;
}

std::vector<std::string> DefaultNames(std::size_t models,
                                      const std::optional<std::vector<std::string>>& names) {
  if (names) return *names;
  std::vector<std::string> out;
  for (std::size_t s = 0; s < models; ++s) out.push_back("model_" + std::to_string(s + 1));
  return out;
}

Dataset MakeDataset(const std::vector<int>& treatment, const std::vector<double>& outcome,
                    const std::vector<std::vector<double>>& scores,
                    const std::optional<std::vector<std::int64_t>>& ids,
                    const std::optional<std::vector<std::string>>& names) {
  std::vector<std::uint8_t> t(treatment.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (treatment[i] != 0 && treatment[i] != 1) throw ArgumentError("treatment must be 0 or 1");
    t[i] = static_cast<std::uint8_t>(treatment[i]);
  }
  std::vector<std::int64_t> row_ids = DefaultIds(t.size(), ids);
  return Dataset::FromColumns(DefaultNames(scores.size(), names), std::move(row_ids),
                              std::move(t), outcome, scores);
}

CheckedDesign MakeDesign(std::int64_t N, std::int64_t n, std::int64_t n_r,
                         const std::optional<std::vector<std::int64_t>>& sub_sizes) {
  SamplingDesign d{N, n, n_r, sub_sizes ? *sub_sizes : std::vector<std::int64_t>{N - n_r}};
  return ValidateDesign(d);
}

py::object GainOrNone(const Gain& g) { return g ? py::cast(*g) : py::none(); }

py::dict BandDict(const CurveBand& band) {
  py::list pct, k, lower, median, upper;
  for (std::size_t g = 0; g < band.points.size(); ++g) {
    const auto& p = band.points[g];
    pct.append(band.grid[g].percentile);
    k.append(band.grid[g].k);
    lower.append(p.missing ? py::none() : py::cast(p.lower));
    median.append(p.missing ? py::none() : py::cast(p.median));
    upper.append(p.missing ? py::none() : py::cast(p.upper));
  }
  py::dict out;
  out["percentile"] = pct;
  out["k"] = k;
  out["lower"] = lower;
  out["median"] = median;
  out["upper"] = upper;
  out["warnings"] = band.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_nbuplift, m) {
  m.doc() = "Uplift curve confidence bands from two-step samples";

  static py::exception<Error> base(m, "Error");
  static py::exception<SchemaError> schema(m, "SchemaError", base.ptr());
  static py::exception<ConfigurationError> config(m, "ConfigurationError", base.ptr());
  static py::exception<ArgumentError> argument(m, "ArgumentError", base.ptr());
  static py::exception<EstimationError> estimation(m, "EstimationError", base.ptr());
  static py::exception<ConsistencyError> consistency(m, "ConsistencyError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SchemaError& e) {
      py::set_error(schema, e.what());
    } catch (const ConfigurationError& e) {
      py::set_error(config, e.what());
    } catch (const ArgumentError& e) {
      py::set_error(argument, e.what());
    } catch (const EstimationError& e) {
      py::set_error(estimation, e.what());
    } catch (const ConsistencyError& e) {
      py::set_error(consistency, e.what());
    }
  });

  m.def("hypergeom_logpmf", [](std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) {
    return HypergeomLogPmf({N, K, n}, k);
  }, py::arg("population"), py::arg("successes"), py::arg("draws"), py::arg("k"));
  m.def("hypergeom_cdf", [](std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) {
    return HypergeomCdf({N, K, n}, k);
  }, py::arg("population"), py::arg("successes"), py::arg("draws"), py::arg("k"));
  m.def("hypergeom_sf", [](std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) {
    return HypergeomSf({N, K, n}, k);
  }, py::arg("population"), py::arg("successes"), py::arg("draws"), py::arg("k"));

  m.def("inclusion_prob_single",
        [](std::int64_t rank, std::int64_t N, std::int64_t n, std::int64_t n_r) {
          return InclusionProbSingle(rank, MakeDesign(N, n, n_r, std::nullopt));
        },
        py::arg("rank"), py::arg("N"), py::arg("n"), py::arg("n_r"));
  m.def("inclusion_prob_multi",
        [](const std::vector<std::int64_t>& ranks, std::int64_t N, std::int64_t n,
           std::int64_t n_r, const std::vector<std::int64_t>& sub_sizes) {
          return InclusionProbMulti(ranks, MakeDesign(N, n, n_r, sub_sizes));
        },
        py::arg("ranks"), py::arg("N"), py::arg("n"), py::arg("n_r"), py::arg("sub_sizes"));
  m.def("equal_sub_sizes", &EqualSubSizes, py::arg("N"), py::arg("n_r"), py::arg("s0"));
  m.def("default_percentiles", &DefaultPercentiles);

  m.def("uplift_curve",
        [](const std::vector<int>& treatment, const std::vector<double>& outcome,
           const std::vector<double>& scores, std::optional<std::vector<std::int64_t>> ids,
           std::optional<std::vector<double>> percentiles) {
          const Dataset data = MakeDataset(treatment, outcome, {scores}, ids, std::nullopt);
          const auto pct = percentiles ? *percentiles : DefaultPercentiles();
          const UpliftCurve c = BuildCurve(data, RankByModel(data, 0), pct);
          py::list p, k, gain, qini, mean;
          for (std::size_t g = 0; g < c.size(); ++g) {
            p.append(c.grid[g].percentile);
            k.append(c.grid[g].k);
            gain.append(GainOrNone(c.gains[g]));
            qini.append(GainOrNone(c.qini[g]));
            mean.append(GainOrNone(c.MeanUplift(g)));
          }
          py::dict out;
          out["percentile"] = p;
          out["k"] = k;
          out["gain"] = gain;
          out["qini"] = qini;
          out["mean_uplift"] = mean;
          return out;
        },
        py::arg("treatment"), py::arg("outcome"), py::arg("scores"), py::arg("ids") = py::none(),
        py::arg("percentiles") = py::none());

  m.def("two_step_sample",
        [](const std::vector<std::vector<double>>& scores, std::int64_t n, std::int64_t n_r,
           std::optional<std::vector<std::int64_t>> sub_sizes,
           std::optional<std::vector<std::int64_t>> ids, std::uint64_t seed, int threads) {
          const std::size_t N = scores.empty() ? 0 : scores.front().size();
          const std::vector<int> t(N, 0);
          const std::vector<double> y(N, 0.0);
          const Dataset data = MakeDataset(t, y, scores, ids, std::nullopt);
          const std::size_t S0 = sub_sizes ? sub_sizes->size() : 1;
          if (S0 > scores.size()) throw ConfigurationError("one score column per sub-universe is needed");
          const auto design = MakeDesign(static_cast<std::int64_t>(N), n, n_r, sub_sizes);
          std::vector<RankAssignment> ranks;
          for (std::size_t s = 0; s < S0; ++s) ranks.push_back(RankByModel(data, s));
          Engine rng = MakeStream(seed, StreamDomain::kSampling);
          ChosenSet chosen = TwoStepSample(data, design, ranks, rng);
          AssignInclusion(chosen, ComputeInclusionTable(ranks, design, threads));
          py::list id, provenance, sub, p;
          for (const auto& c : chosen.members) {
            id.append(c.id);
            provenance.append(c.provenance == Provenance::kSrs ? "SRS" : "RANKED");
            sub.append(c.sub_universe < 0 ? py::none() : py::cast(c.sub_universe + 1));
            p.append(c.p_inclusion);
          }
          py::dict out;
          out["id"] = id;
          out["provenance"] = provenance;
          out["sub_universe"] = sub;
          out["p_inclusion"] = p;
          return out;
        },
        py::arg("scores"), py::arg("n"), py::arg("n_r"), py::arg("sub_sizes") = py::none(),
        py::arg("ids") = py::none(), py::arg("seed") = 1, py::arg("threads") = 0);

  m.def("inclusion_probabilities",
        [](const std::vector<std::vector<double>>& scores, std::int64_t n, std::int64_t n_r,
           std::optional<std::vector<std::int64_t>> sub_sizes,
           std::optional<std::vector<std::int64_t>> ids, int threads) {
          const std::size_t N = scores.empty() ? 0 : scores.front().size();
          const Dataset data = MakeDataset(std::vector<int>(N, 0), std::vector<double>(N, 0.0),
                                           scores, ids, std::nullopt);
          const std::size_t S0 = sub_sizes ? sub_sizes->size() : 1;
          std::vector<RankAssignment> ranks;
          for (std::size_t s = 0; s < S0 && s < scores.size(); ++s) {
            ranks.push_back(RankByModel(data, s));
          }
          return ComputeInclusionTable(
                     ranks, MakeDesign(static_cast<std::int64_t>(N), n, n_r, sub_sizes), threads)
              .p;
        },
        py::arg("scores"), py::arg("n"), py::arg("n_r"), py::arg("sub_sizes") = py::none(),
        py::arg("ids") = py::none(), py::arg("threads") = 0);

  m.def("estimate_bands",
        [](const std::vector<int>& treatment, const std::vector<double>& outcome,
           const std::vector<std::vector<double>>& scores, const std::vector<double>& p_inclusion,
           std::int64_t population_size, std::optional<std::vector<std::string>> model_names,
           std::optional<std::vector<std::int64_t>> ids, int outer, int inner, double alpha,
           std::optional<std::vector<double>> percentiles, std::uint64_t seed, int threads,
           bool mean_uplift, std::optional<std::pair<std::string, std::string>> compare) {
          const Dataset sample = MakeDataset(treatment, outcome, scores, ids, model_names);
          BootstrapConfig cfg;
          cfg.outer_replicates = outer;
          cfg.inner_replicates = inner;
          cfg.alpha = alpha;
          if (percentiles) cfg.percentiles = *percentiles;
          cfg.seed = seed;
          cfg.threads = threads;
          const CurveEnsemble e = NestedBootstrap(sample, p_inclusion, population_size, cfg);
          auto scale = [&](CurveBand b) { return mean_uplift ? ToMeanUpliftScale(std::move(b)) : b; };
          py::dict bands;
          for (std::size_t s = 0; s < sample.model_count(); ++s) {
            bands[py::str(sample.model_names()[s])] = BandDict(scale(SummarizeBand(e, s, alpha)));
          }
          py::dict out;
          out["bands"] = bands;
          if (compare) {
            const auto a = sample.ModelIndex(compare->first);
            const auto b = sample.ModelIndex(compare->second);
            if (!a || !b) throw ConfigurationError("unknown model in compare");
            out["difference"] = BandDict(scale(DifferenceBand(e, *a, *b, alpha)));
          }
          return out;
        },
        py::arg("treatment"), py::arg("outcome"), py::arg("scores"), py::arg("p_inclusion"),
        py::arg("population_size"), py::arg("model_names") = py::none(),
        py::arg("ids") = py::none(), py::arg("outer") = 100, py::arg("inner") = 10,
        py::arg("alpha") = 0.05, py::arg("percentiles") = py::none(), py::arg("seed") = 1,
        py::arg("threads") = 0, py::arg("mean_uplift") = false, py::arg("compare") = py::none());

  m.def("generate_population",
        [](std::int64_t population_size, double sigma, double treat_ratio, std::uint64_t seed,
           std::int64_t training_size, double noise_sd) {
          DgpSpec spec;
          spec.population_size = population_size;
          spec.sigma = sigma;
          spec.treat_ratio = treat_ratio;
          spec.seed = seed;
          const auto scorers = TrainBuiltinScorers(spec, training_size, noise_sd, seed);
          Engine noise = MakeStream(seed, StreamDomain::kScoreNoise);
          const Population pop = GeneratePopulation(spec);
          const auto scores = ScorePopulation(scorers, pop, noise);
          std::vector<int> t(pop.treatment.begin(), pop.treatment.end());
          std::vector<double> uplift(pop.size);
          for (std::size_t i = 0; i < pop.size; ++i) uplift[i] = pop.true_uplift(i);
          py::dict out;
          out["id"] = DefaultIds(pop.size, std::nullopt);
          out["treatment"] = t;
          out["outcome"] = pop.outcome;
          out["model_1"] = scores[0];
          out["model_2"] = scores[1];
          out["true_uplift"] = uplift;
          return out;
        },
        py::arg("population_size") = 20000, py::arg("sigma") = 1.0, py::arg("treat_ratio") = 0.5,
        py::arg("seed") = 1, py::arg("training_size") = kDefaultTrainingSize,
        py::arg("noise_sd") = kDefaultOracleNoiseSd);
}
