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

#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nbuplift/bootstrap.hpp"
#include "nbuplift/coverage.hpp"
#include "nbuplift/design.hpp"
#include "nbuplift/errors.hpp"
#include "nbuplift/inclusion.hpp"
#include "nbuplift/io.hpp"
#include "nbuplift/parallel.hpp"
#include "nbuplift/simulation.hpp"
#include "nbuplift/svg_plot.hpp"

namespace nbuplift::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

// Canonical JSON of every option a command resolved (flags, config file and
// defaults), used for the config hash. The thread count is left out because
// it never changes results.
std::string CanonicalConfig(const CLI::App& app) {
  ordered_json j;
  j["command"] = app.get_name();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "threads" || name == "output" || name == "plot" ||
        name == "design-out") {
      continue;
    }
    std::vector<std::string> values = opt->results();
    if (values.empty() && !opt->get_default_str().empty()) {
      values = {opt->get_default_str()};
    }
    if (values.empty()) continue;
    j[name] = values.size() == 1 ? ordered_json(values.front()) : ordered_json(values);
  }
  return j.dump();
}

// Config files are flat JSON objects whose keys are the long flag names of
// the command, e.g. {"srs-size": 2000, "sub-sizes": [9000, 9000]}. Values
// given on the command line win. The option lives on the root app, so keys
// are routed to whichever subcommand was selected.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool, bool, std::string) const override {
    return CanonicalConfig(*app);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    const std::string text{std::istreambuf_iterator<char>(input),
                           std::istreambuf_iterator<char>()};
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<std::string> parents;
    for (const CLI::App* sub : root_->get_subcommands()) parents.push_back(sub->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(Scalar(key, v));
      } else {
        item.inputs.push_back(Scalar(key, value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string Scalar(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("config key '" + key + "' must be a scalar or a list of scalars");
  }

  const CLI::App* root_;
};

// ---------------------------------------------------------------------------
// Shared helpers

struct Common {
  std::uint64_t seed = 1;
  int threads = 0;
};

void AddCommon(CLI::App* cmd, Common& common) {
  cmd->fallthrough();
  cmd->add_option("--seed", common.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--threads", common.threads,
                  "Worker threads (0: NBUPLIFT_THREADS or all cores)")
      ->capture_default_str();
}

io::Comments Header(const CLI::App& cmd, std::uint64_t seed) {
  return {"nbuplift " + cmd.get_name(), "seed=" + std::to_string(seed),
          "config_hash=" + io::Fnv1aHex(CanonicalConfig(cmd))};
}

template <typename WriteFn>
void WriteFile(const std::string& path, WriteFn&& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw ConfigurationError("failed writing '" + path + "'");
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

std::size_t ModelIndex(const Dataset& data, const std::string& name) {
  const auto idx = data.ModelIndex(name);
  if (!idx) {
    throw ConfigurationError("unknown model '" + name +
                             "'; available: " + JoinNames(data.model_names()));
  }
  return *idx;
}

bool Given(const CLI::Option* opt) { return opt->count() > 0; }

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  Common common;
  std::int64_t population_size = 20000;
  int covariates = 40;
  double sigma = 1.0;
  double treat_ratio = 0.5;
  double effect_scale = 2.0;
  std::string form = "nonlinear";
  std::int64_t training_size = kDefaultTrainingSize;
  double noise_sd = kDefaultOracleNoiseSd;
  std::string output;
};

void AddScorerOptions(CLI::App* cmd, std::int64_t& training_size, double& noise_sd) {
  cmd->add_option("--training-size", training_size,
                  "Rows in the independent population used to fit model_2")
      ->capture_default_str();
  cmd->add_option("--noise-sd", noise_sd, "Noise sd added to true uplift for model_1")
      ->capture_default_str();
}

void RunGenerate(const CLI::App& cmd, const GenerateOptions& o) {
  DgpSpec spec;
  spec.population_size = o.population_size;
  spec.covariates = o.covariates;
  spec.sigma = o.sigma;
  spec.treat_ratio = o.treat_ratio;
  spec.effect_scale = o.effect_scale;
  spec.form = o.form == "linear" ? DgpForm::kLinear : DgpForm::kNonlinear;
  spec.seed = o.common.seed;
  const auto scorers =
      TrainBuiltinScorers(spec, o.training_size, o.noise_sd, o.common.seed);
  Engine noise_rng = MakeStream(o.common.seed, StreamDomain::kScoreNoise);
  const auto pop = GeneratePopulation(spec);
  const auto data = PopulationDataset(pop, ScorePopulation(scorers, pop, noise_rng));
  WriteFile(o.output, [&](std::ostream& out) {
    io::WriteDataset(out, data, Header(cmd, o.common.seed));
  });
  std::fprintf(stderr, "wrote %zu units with scores model_1, model_2 to %s\n",
               data.size(), o.output.c_str());
}

// ---------------------------------------------------------------------------
// sample

struct SampleOptions {
  Common common;
  std::string data;
  std::string design;
  std::int64_t population_size = 0;
  std::int64_t sample_size = 0;
  std::int64_t srs_size = 0;
  int s0 = 0;
  std::vector<std::int64_t> sub_sizes;
  std::vector<std::string> rank_models;
  std::string output;
  std::string design_out;
  CLI::Option* population_size_opt = nullptr;
  CLI::Option* sample_size_opt = nullptr;
  CLI::Option* srs_size_opt = nullptr;
  CLI::Option* s0_opt = nullptr;
  CLI::Option* sub_sizes_opt = nullptr;
};

void RunSample(const CLI::App& cmd, const SampleOptions& o) {
  const Dataset data = io::ReadDatasetFile(o.data);
  SamplingDesign d;
  const bool from_file = !o.design.empty();
  if (from_file) d = io::DesignFromJson(ReadText(o.design));
  if (Given(o.population_size_opt)) d.population_size = o.population_size;
  if (!from_file && !Given(o.population_size_opt)) {
    d.population_size = static_cast<std::int64_t>(data.size());
  }
  if (Given(o.sample_size_opt)) d.sample_size = o.sample_size;
  if (Given(o.srs_size_opt)) d.srs_size = o.srs_size;
  if (!from_file && !(Given(o.sample_size_opt) && Given(o.srs_size_opt))) {
    throw ConfigurationError("sample needs --sample-size and --srs-size, or --design");
  }
  if (Given(o.sub_sizes_opt)) {
    d.sub_sizes = o.sub_sizes;
  } else if (Given(o.s0_opt)) {
    if (o.s0 < 1) throw ConfigurationError("--s0 must be at least 1");
    d.sub_sizes = EqualSubSizes(d.population_size, d.srs_size, static_cast<std::size_t>(o.s0));
  } else if (!from_file || Given(o.population_size_opt) || Given(o.srs_size_opt)) {
    const std::size_t s0 = from_file ? d.sub_sizes.size() : 1;
    d.sub_sizes = EqualSubSizes(d.population_size, d.srs_size, s0);
  }
  if (d.population_size != static_cast<std::int64_t>(data.size())) {
    throw ConfigurationError("design N=" + std::to_string(d.population_size) +
                             " but the population file has " +
                             std::to_string(data.size()) + " rows");
  }
  const CheckedDesign design = ValidateDesign(d);

  std::vector<std::string> rank_models = o.rank_models;
  const std::size_t S0 = d.sub_sizes.size();
  if (rank_models.empty()) {
    if (S0 > data.model_count()) {
      throw ConfigurationError("design has " + std::to_string(S0) +
                               " sub-universes but the file has only " +
                               std::to_string(data.model_count()) + " score columns");
    }
    rank_models.assign(data.model_names().begin(), data.model_names().begin() + static_cast<std::ptrdiff_t>(S0));
  }
  if (rank_models.size() != S0) {
    throw ConfigurationError("--rank-models lists " + std::to_string(rank_models.size()) +
                             " models for " + std::to_string(S0) + " sub-universes");
  }
  std::vector<RankAssignment> ranks;
  for (const auto& name : rank_models) ranks.push_back(RankByModel(data, ModelIndex(data, name)));

  const InclusionTable table = ComputeInclusionTable(ranks, design, o.common.threads);
  Engine rng = MakeStream(o.common.seed, StreamDomain::kSampling);
  ChosenSet chosen = TwoStepSample(data, design, ranks, rng);
  AssignInclusion(chosen, table);

  const auto header = Header(cmd, o.common.seed);
  WriteFile(o.output, [&](std::ostream& out) { io::WriteChosenSet(out, chosen, header); });
  ordered_json sidecar = ordered_json::parse(io::DesignToJson(d, o.common.seed));
  sidecar["rank_models"] = rank_models;
  sidecar["config_hash"] = header.back().substr(std::string("config_hash=").size());
  const std::string sidecar_path = o.design_out.empty() ? o.output + ".design.json" : o.design_out;
  WriteFile(sidecar_path, [&](std::ostream& out) { out << sidecar.dump(2) << '\n'; });

  std::fprintf(stderr, "chose %zu of %lld units (%lld random, %lld by rank); design in %s\n",
               chosen.size(), static_cast<long long>(d.population_size),
               static_cast<long long>(d.srs_size),
               static_cast<long long>(d.sample_size - d.srs_size), sidecar_path.c_str());
}

// ---------------------------------------------------------------------------
// estimate / compare

struct EstimateOptions {
  Common common;
  std::string data;
  std::string chosen;
  std::string design;
  std::int64_t population_size = 0;
  int outer = 100;
  int inner = 10;
  double alpha = 0.05;
  std::vector<double> percentiles;
  std::string scale = "gain";
  std::string output;
  std::string plot;
  // estimate
  std::vector<std::string> models;
  std::string ensemble;
  // compare
  std::string model_a;
  std::string model_b;
  CLI::Option* population_size_opt = nullptr;
};

void AddEstimateOptions(CLI::App* cmd, EstimateOptions& o) {
  AddCommon(cmd, o.common);
  cmd->add_option("--data", o.data, "Dataset CSV holding the chosen units' outcomes and scores")
      ->required();
  cmd->add_option("--chosen", o.chosen, "Chosen-set CSV written by `sample`")->required();
  cmd->add_option("--design", o.design, "Design JSON written by `sample` (supplies N)");
  o.population_size_opt =
      cmd->add_option("--population-size", o.population_size, "Population size N");
  cmd->add_option("--outer", o.outer, "Outer bootstrap replicates B")->capture_default_str();
  cmd->add_option("--inner", o.inner, "Inner bootstrap replicates D")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Two-sided band level 1 - alpha")->capture_default_str();
  cmd->add_option("--percentiles", o.percentiles, "Selection percentiles (default 5,10,...,100)")
      ->delimiter(',');
  cmd->add_option("--scale", o.scale, "Band scale")
      ->check(CLI::IsMember({"gain", "mean-uplift"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", o.output, "Output CSV")->required();
  cmd->add_option("--plot", o.plot, "Also write an SVG plot to this path");
}

struct EstimationInputs {
  Dataset sample;
  std::vector<double> p;
  std::int64_t population_size = 0;
};

EstimationInputs LoadEstimationInputs(const EstimateOptions& o) {
  const Dataset data = io::ReadDatasetFile(o.data);
  const auto rows = io::ReadChosenSetFile(o.chosen);
  std::unordered_map<std::int64_t, std::size_t> where;
  where.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) where.emplace(data.ids()[i], i);

  EstimationInputs in;
  std::vector<std::size_t> positions;
  positions.reserve(rows.size());
  in.p.reserve(rows.size());
  for (const auto& row : rows) {
    const auto it = where.find(row.id);
    if (it == where.end()) {
      throw SchemaError("chosen id " + std::to_string(row.id) + " is not in " + o.data);
    }
    if (!data.observed()[it->second]) {
      throw SchemaError("chosen id " + std::to_string(row.id) + " has no observed outcome in " +
                        o.data);
    }
    positions.push_back(it->second);
    in.p.push_back(*row.p_inclusion);
  }
  in.sample = data.Subset(positions);

  if (Given(o.population_size_opt)) {
    in.population_size = o.population_size;
  } else if (!o.design.empty()) {
    in.population_size = io::DesignFromJson(ReadText(o.design)).population_size;
  } else {
    throw ConfigurationError("population size unknown; pass --population-size or --design");
  }
  return in;
}

CurveEnsemble RunBootstrap(const EstimateOptions& o, const EstimationInputs& in) {
  BootstrapConfig cfg;
  cfg.outer_replicates = o.outer;
  cfg.inner_replicates = o.inner;
  cfg.alpha = o.alpha;
  if (!o.percentiles.empty()) cfg.percentiles = o.percentiles;
  cfg.seed = o.common.seed;
  cfg.threads = o.common.threads;
  CurveEnsemble e = NestedBootstrap(in.sample, in.p, in.population_size, cfg);
  for (const auto& w : e.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return e;
}

CurveBand Scaled(CurveBand band, const std::string& scale) {
  return scale == "mean-uplift" ? ToMeanUpliftScale(std::move(band)) : band;
}

std::string YLabel(const std::string& scale) {
  return scale == "mean-uplift" ? "mean uplift" : "cumulative gain";
}

void WriteWarnings(const CurveBand& band) {
  for (const auto& w : band.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

void RunEstimate(const CLI::App& cmd, const EstimateOptions& o) {
  const EstimationInputs in = LoadEstimationInputs(o);
  std::vector<std::size_t> models;
  if (o.models.empty()) {
    for (std::size_t s = 0; s < in.sample.model_count(); ++s) models.push_back(s);
  } else {
    for (const auto& name : o.models) models.push_back(ModelIndex(in.sample, name));
  }
  const CurveEnsemble e = RunBootstrap(o, in);
  std::vector<io::NamedBand> bands;
  for (const std::size_t s : models) {
    bands.push_back({in.sample.model_names()[s], Scaled(SummarizeBand(e, s, o.alpha), o.scale)});
    WriteWarnings(bands.back().band);
  }
  auto header = Header(cmd, o.common.seed);
  header.push_back("scale=" + o.scale);
  WriteFile(o.output, [&](std::ostream& out) { io::WriteBands(out, bands, header); });
  if (!o.ensemble.empty()) {
    WriteFile(o.ensemble, [&](std::ostream& out) { io::WriteEnsemble(out, e, header); });
  }
  if (!o.plot.empty()) {
    std::vector<PlotSeries> series;
    for (const auto& b : bands) series.push_back({b.model, b.band});
    const std::string svg = RenderBandsSvg(
        series, "Uplift curve bands (" + std::to_string(static_cast<int>((1 - o.alpha) * 100 + 0.5)) + "%)",
        YLabel(o.scale), false);
    WriteFile(o.plot, [&](std::ostream& out) { out << svg; });
  }
  std::printf("%-12s %10s %6s %14s %14s %14s\n", "model", "percentile", "k", "lower", "median",
              "upper");
  for (const auto& b : bands) {
    for (std::size_t g = 0; g < b.band.points.size(); ++g) {
      const auto& pt = b.band.points[g];
      if (pt.missing) {
        std::printf("%-12s %10g %6lld %14s %14s %14s\n", b.model.c_str(),
                    b.band.grid[g].percentile, static_cast<long long>(b.band.grid[g].k), "-",
                    "-", "-");
      } else {
        std::printf("%-12s %10g %6lld %14.6g %14.6g %14.6g\n", b.model.c_str(),
                    b.band.grid[g].percentile, static_cast<long long>(b.band.grid[g].k),
                    pt.lower, pt.median, pt.upper);
      }
    }
  }
}

void RunCompare(const CLI::App& cmd, const EstimateOptions& o) {
  const EstimationInputs in = LoadEstimationInputs(o);
  std::string a = o.model_a, b = o.model_b;
  if (a.empty() || b.empty()) {
    if (in.sample.model_count() < 2) {
      throw ConfigurationError("compare needs two score columns; the file has " +
                               JoinNames(in.sample.model_names()));
    }
    if (a.empty()) a = in.sample.model_names()[0];
    if (b.empty()) b = in.sample.model_names()[a == in.sample.model_names()[1] ? 0 : 1];
  }
  const std::size_t ia = ModelIndex(in.sample, a), ib = ModelIndex(in.sample, b);
  if (ia == ib) throw ConfigurationError("compare needs two different models");
  const CurveEnsemble e = RunBootstrap(o, in);
  const CurveBand band = Scaled(DifferenceBand(e, ia, ib, o.alpha), o.scale);
  WriteWarnings(band);
  auto header = Header(cmd, o.common.seed);
  header.push_back("scale=" + o.scale);
  WriteFile(o.output, [&](std::ostream& out) { io::WriteDifferenceBand(out, a, b, band, header); });
  if (!o.plot.empty()) {
    const std::string svg = RenderBandsSvg({{a + " - " + b, band}},
                                           "Difference band: " + a + " - " + b,
                                           YLabel(o.scale) + " difference", true);
    WriteFile(o.plot, [&](std::ostream& out) { out << svg; });
  }
  std::printf("%s - %s\n%10s %14s %14s %14s  %s\n", a.c_str(), b.c_str(), "percentile", "lower",
              "median", "upper", "verdict");
  for (std::size_t g = 0; g < band.points.size(); ++g) {
    const auto& pt = band.points[g];
    const char* verdict = io::VerdictName(io::Classify(pt));
    if (pt.missing) {
      std::printf("%10g %14s %14s %14s  %s\n", band.grid[g].percentile, "-", "-", "-", verdict);
    } else {
      std::printf("%10g %14.6g %14.6g %14.6g  %s\n", band.grid[g].percentile, pt.lower,
                  pt.median, pt.upper, verdict);
    }
  }
}

// ---------------------------------------------------------------------------
// simulate / coverage

struct SimulationOptions {
  Common common;
  int scenario = 3;
  std::vector<int> scenarios;
  std::int64_t population_size = 20000;
  std::vector<std::int64_t> population_sizes;
  double treat_ratio = 0.5;
  double sigma = 1.0;
  int replications = 100;
  int outer = 100;
  int inner = 10;
  double alpha = 0.05;
  int oracle_replications = 200;
  std::int64_t training_size = kDefaultTrainingSize;
  double noise_sd = kDefaultOracleNoiseSd;
  std::string output;
};

void AddSimulationOptions(CLI::App* cmd, SimulationOptions& o) {
  AddCommon(cmd, o.common);
  cmd->add_option("--treat-ratio", o.treat_ratio, "Treated share")->capture_default_str();
  cmd->add_option("--sigma", o.sigma, "Outcome noise sd")->capture_default_str();
  cmd->add_option("--replications,-K", o.replications, "Replications K")->capture_default_str();
  cmd->add_option("--outer", o.outer, "Outer bootstrap replicates B")->capture_default_str();
  cmd->add_option("--inner", o.inner, "Inner bootstrap replicates D")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Two-sided band level 1 - alpha")->capture_default_str();
  cmd->add_option("--oracle-replications", o.oracle_replications,
                  "Populations averaged for the oracle curves")
      ->capture_default_str();
  AddScorerOptions(cmd, o.training_size, o.noise_sd);
  cmd->add_option("--output,-o", o.output, "Coverage report CSV")->required();
}

void PrintSummary(const CoverageReport& r) {
  std::printf("scenario %d, N=%lld, ratio %g: %d completed, %d excluded, %.1f s\n", r.scenario.id,
              static_cast<long long>(r.scenario.population_size), r.scenario.treat_ratio,
              r.completed, r.excluded, r.runtime_seconds);
  for (const auto& f : r.failures) std::printf("  excluded: %s\n", f.c_str());
  std::printf("%10s %8s %8s %8s %10s %8s\n", "percentile", "cov_m1", "cov_m2", "cov_diff",
              "diff_bias", "diff_se");
  for (const auto& row : r.rows) {
    std::printf("%10g %8.3f %8.3f %8.3f %+10.4f %8.4f\n", row.percentile, row.model1_cov,
                row.model2_cov, row.diff_cov, row.diff_bias, row.diff_se);
  }
  std::fflush(stdout);
}

void RunSimulations(const CLI::App& cmd, const SimulationOptions& o,
                    const std::vector<int>& ids, const std::vector<std::int64_t>& sizes) {
  std::vector<CoverageReport> reports;
  std::optional<BuiltinScorers> scorers;
  for (const std::int64_t N : sizes) {
    std::vector<ScenarioSpec> specs;
    for (const int id : ids) {
      ScenarioSpec sc = MakeScenario(id, N, o.treat_ratio);
      sc.sigma = o.sigma;
      sc.replications = o.replications;
      sc.bootstrap.outer_replicates = o.outer;
      sc.bootstrap.inner_replicates = o.inner;
      sc.bootstrap.alpha = o.alpha;
      sc.seed = o.common.seed;
      ScenarioDesign(sc);  // fail before any long computation
      specs.push_back(sc);
    }
    // The oracle depends on the population process only, so scenarios share it.
    const DgpSpec dgp = ScenarioDgp(specs.front());
    if (!scorers) {
      scorers = TrainBuiltinScorers(dgp, o.training_size, o.noise_sd, o.common.seed);
    }
    std::fprintf(stderr, "N=%lld: computing oracle over %d populations\n",
                 static_cast<long long>(N), o.oracle_replications);
    const OracleCurves oracle =
        ComputeOracleCurves(dgp, *scorers, o.oracle_replications,
                            specs.front().bootstrap.percentiles, o.common.threads);
    for (const auto& sc : specs) {
      std::fprintf(stderr, "running scenario %d at N=%lld, K=%d\n", sc.id,
                   static_cast<long long>(N), sc.replications);
      reports.push_back(RunCoverageExperiment(sc, *scorers, oracle, o.common.threads));
      PrintSummary(reports.back());
    }
  }
  WriteFile(o.output, [&](std::ostream& out) {
    io::WriteCoverage(out, reports, Header(cmd, o.common.seed));
  });
}

}  // namespace

// ---------------------------------------------------------------------------

int Main(int argc, const char* const* argv) {
  CLI::App app{"Uplift curve confidence bands from two-step samples"};
  app.name("nbuplift");
  app.require_subcommand(1);
  app.set_config("--config", "", "JSON file of option values keyed by long flag name");
  app.config_formatter(std::make_shared<JsonConfig>(&app));

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic population with two model scores");
  AddCommon(generate, gen.common);
  generate->add_option("--population-size,-N", gen.population_size, "Units")->capture_default_str();
  generate->add_option("--covariates", gen.covariates, "Covariate count")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "Outcome noise sd")->capture_default_str();
  generate->add_option("--treat-ratio", gen.treat_ratio, "Treated share")->capture_default_str();
  generate->add_option("--effect-scale", gen.effect_scale, "Treatment effect multiplier")
      ->capture_default_str();
  generate->add_option("--form", gen.form, "Outcome model")
      ->check(CLI::IsMember({"nonlinear", "linear"}))
      ->capture_default_str();
  AddScorerOptions(generate, gen.training_size, gen.noise_sd);
  generate->add_option("--output,-o", gen.output, "Dataset CSV")->required();

  SampleOptions smp;
  auto* sample = app.add_subcommand("sample", "Draw a two-step sample and its inclusion probabilities");
  AddCommon(sample, smp.common);
  sample->add_option("--data", smp.data, "Population dataset CSV")->required();
  sample->add_option("--design", smp.design, "Design JSON (keys N, n, n_r, S0, sub_sizes)");
  smp.population_size_opt =
      sample->add_option("--population-size,-N", smp.population_size, "Population size N");
  smp.sample_size_opt = sample->add_option("--sample-size,-n", smp.sample_size, "Total sample size n");
  smp.srs_size_opt = sample->add_option("--srs-size", smp.srs_size, "Simple random sample size n_r");
  smp.s0_opt = sample->add_option("--s0", smp.s0, "Number of ranked sub-universes (equal split)");
  smp.sub_sizes_opt = sample->add_option("--sub-sizes", smp.sub_sizes, "Sub-universe sizes")
                          ->delimiter(',');
  sample->add_option("--rank-models", smp.rank_models,
                     "Score column ranking each sub-universe (default: the first S0)")
      ->delimiter(',');
  sample->add_option("--output,-o", smp.output, "Chosen-set CSV")->required();
  sample->add_option("--design-out", smp.design_out, "Design sidecar path (default <output>.design.json)");

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Bootstrap bands for each model's uplift curve");
  AddEstimateOptions(estimate, est);
  estimate->add_option("--models", est.models, "Models to report (default: all)")->delimiter(',');
  estimate->add_option("--ensemble", est.ensemble, "Also write every bootstrap curve here");

  EstimateOptions cmp;
  auto* compare = app.add_subcommand("compare", "Paired difference band between two models");
  AddEstimateOptions(compare, cmp);
  compare->add_option("--model-a", cmp.model_a, "First model (default: first score column)");
  compare->add_option("--model-b", cmp.model_b, "Second model (default: second score column)");

  SimulationOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Coverage study for one scenario");
  AddSimulationOptions(simulate, sim);
  simulate->add_option("--scenario", sim.scenario, "Scenario id 0-7")->capture_default_str();
  simulate->add_option("--population-size,-N", sim.population_size, "Population size N")
      ->capture_default_str();

  SimulationOptions cov;
  cov.scenarios = {0, 1, 2, 3, 4, 5, 6, 7};
  cov.population_sizes = {20000};
  auto* coverage = app.add_subcommand("coverage", "Coverage study over scenarios and sizes");
  AddSimulationOptions(coverage, cov);
  coverage->add_option("--scenarios", cov.scenarios, "Scenario ids")
      ->delimiter(',')
      ->capture_default_str();
  coverage->add_option("--population-sizes", cov.population_sizes, "Population sizes")
      ->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CLI::FileError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) RunGenerate(*generate, gen);
    if (sample->parsed()) RunSample(*sample, smp);
    if (estimate->parsed()) RunEstimate(*estimate, est);
    if (compare->parsed()) RunCompare(*compare, cmp);
    if (simulate->parsed()) RunSimulations(*simulate, sim, {sim.scenario}, {sim.population_size});
    if (coverage->parsed()) RunSimulations(*coverage, cov, cov.scenarios, cov.population_sizes);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::kSchema:
        return kExitSchema;
      case ErrorKind::kArgument:
      case ErrorKind::kConfiguration:
        return kExitConfig;
      case ErrorKind::kEstimation:
        return kExitEstimation;
      case ErrorKind::kConsistency:
        return kExitInternal;
    }
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace nbuplift::cli
