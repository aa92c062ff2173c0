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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "doctest.h"
#include "nbuplift/bootstrap.hpp"
#include "nbuplift/inclusion.hpp"
#include "nbuplift/io.hpp"
#include "test_support.hpp"

using namespace nbuplift;
namespace fs = std::filesystem;

namespace {

fs::path TempDir() {
  const char* env = std::getenv("NBUPLIFT_TEST_TMP");
  const fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "nbuplift_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string P(const std::string& name) { return (TempDir() / name).string(); }

int Run(std::vector<std::string> args) {
  args.insert(args.begin(), "nbuplift");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::Main(static_cast<int>(argv.size()), argv.data());
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Body of a CSV without its '#' comment lines.
std::string Body(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line + "\n";
  }
  return out;
}

// Population with outcomes and two score columns, shared by the tests below.
const std::string& PopulationCsv() {
  static const std::string path = [] {
    const std::string p = P("population.csv");
    REQUIRE(Run({"generate", "-N", "4000", "--training-size", "4000", "--seed", "3", "-o", p}) ==
            0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("sample then estimate reproduces the in-process bands") {
  const std::string chosen = P("rt_chosen.csv"), bands = P("rt_bands.csv");
  REQUIRE(Run({"sample", "--data", PopulationCsv(), "-n", "440", "--srs-size", "40", "--seed", "7",
               "-o", chosen}) == 0);
  REQUIRE(fs::exists(chosen + ".design.json"));
  REQUIRE(Run({"estimate", "--data", PopulationCsv(), "--chosen", chosen, "--design",
               chosen + ".design.json", "--outer", "30", "--inner", "4", "--seed", "11", "-o",
               bands, "--threads", "1"}) == 0);

  const Dataset data = io::ReadDatasetFile(PopulationCsv());
  const std::vector<RankAssignment> ranks = {RankByModel(data, 0)};
  const auto design = ValidateDesign({4000, 440, 40, {3960}});
  Engine rng = MakeStream(7, StreamDomain::kSampling);
  ChosenSet c = TwoStepSample(data, design, ranks, rng);
  AssignInclusion(c, ComputeInclusionTable(ranks, design));
  std::vector<double> p;
  for (const auto& m : c.members) p.push_back(m.p_inclusion);
  BootstrapConfig cfg;
  cfg.outer_replicates = 30;
  cfg.inner_replicates = 4;
  cfg.seed = 11;
  cfg.threads = 2;
  const auto e = NestedBootstrap(data.Subset(c.positions()), p, 4000, cfg);
  std::ostringstream want;
  io::WriteBands(want, {{"model_1", SummarizeBand(e, 0, 0.05)},
                        {"model_2", SummarizeBand(e, 1, 0.05)}});
  const std::string got = Slurp(bands);
  CHECK(Body(got) == want.str());
  CHECK(got.find("# seed=11\n") != std::string::npos);
  CHECK(got.find("# config_hash=") != std::string::npos);
}

TEST_CASE("estimate output is byte-identical across thread counts") {
  const std::string chosen = P("th_chosen.csv");
  REQUIRE(Run({"sample", "--data", PopulationCsv(), "-n", "440", "--srs-size", "40", "-o", chosen}) == 0);
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "3"}) {
    const std::string out = P(std::string("th_bands_") + threads + ".csv");
    REQUIRE(Run({"estimate", "--data", PopulationCsv(), "--chosen", chosen, "--population-size",
                 "4000", "--outer", "20", "--inner", "3", "--threads", threads, "-o", out,
                 "--plot", out + ".svg"}) == 0);
    outputs.push_back(Slurp(out));
    CHECK(Slurp(out + ".svg").rfind("<svg", 0) == 0);
  }
  CHECK(outputs[0] == outputs[1]);
}

TEST_CASE("config file values and flag overrides") {
  const std::string config = P("cfg.json");
  Spit(config, R"({"data": ")" + PopulationCsv() +
                   R"(", "sample-size": 440, "srs-size": 40, "seed": 5})");
  const std::string a = P("cfg_a.csv"), b = P("cfg_b.csv"), c = P("cfg_c.csv");
  REQUIRE(Run({"sample", "--config", config, "-o", a}) == 0);
  REQUIRE(Run({"sample", "--data", PopulationCsv(), "-n", "440", "--srs-size", "40", "--seed", "5",
               "-o", b}) == 0);
  CHECK(Body(Slurp(a)) == Body(Slurp(b)));
  REQUIRE(Run({"sample", "--config", config, "--seed", "6", "-o", c}) == 0);
  CHECK(Slurp(c).find("# seed=6\n") != std::string::npos);
  CHECK(Body(Slurp(c)) != Body(Slurp(a)));

  Spit(P("bad.json"), "{not json");
  CHECK(Run({"sample", "--config", P("bad.json"), "-o", P("bad.csv")}) == cli::kExitConfig);
}

TEST_CASE("compare on identical columns is inconclusive everywhere") {
  Engine rng(4);
  const auto base = testing::RandomDataset(600, 1, rng);
  const std::vector<double> s(base.scores(0).begin(), base.scores(0).end());
  const auto twin = Dataset::FromColumns(
      {"a", "b"}, {base.ids().begin(), base.ids().end()},
      {base.treatment().begin(), base.treatment().end()},
      {base.outcome().begin(), base.outcome().end()}, {s, s});
  const std::string data = P("twin.csv"), chosen = P("twin_chosen.csv"), diff = P("twin_diff.csv");
  {
    std::ofstream out(data);
    io::WriteDataset(out, twin);
  }
  REQUIRE(Run({"sample", "--data", data, "-n", "120", "--srs-size", "60", "-o", chosen}) == 0);
  REQUIRE(Run({"compare", "--data", data, "--chosen", chosen, "--population-size", "600",
               "--outer", "10", "--inner", "2", "-o", diff}) == 0);
  const std::string body = Body(Slurp(diff));
  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  CHECK(line == "model_a,model_b,percentile,k,lower,median,upper,verdict");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",0,0,0,INCONCLUSIVE") != std::string::npos);
  }
  CHECK(rows == 20);
}

TEST_CASE("exit codes") {
  CHECK(Run({"--help"}) == cli::kExitOk);
  CHECK(Run({"sample", "--no-such-flag"}) == cli::kExitUsage);
  CHECK(Run({}) == cli::kExitUsage);
  // n_r = 0 is rejected by design validation.
  CHECK(Run({"sample", "--data", PopulationCsv(), "-n", "440", "--srs-size", "0", "-o",
             P("x.csv")}) == cli::kExitConfig);
  // A chosen set without p_inclusion is a schema error.
  Spit(P("no_p.csv"), "id,provenance\n1,SRS\n");
  CHECK(Run({"estimate", "--data", PopulationCsv(), "--chosen", P("no_p.csv"), "--population-size",
             "4000", "-o", P("x.csv")}) == cli::kExitSchema);
  // Malformed population rows report a schema error.
  Spit(P("bad_rows.csv"), "id,treatment,outcome,score_a\n1,1,0,0.5\n2,7,0,0.1\n");
  CHECK(Run({"sample", "--data", P("bad_rows.csv"), "-n", "2", "--srs-size", "1", "-o",
             P("x.csv")}) == cli::kExitSchema);
  // Unknown model names are configuration errors.
  const std::string chosen = P("ex_chosen.csv");
  REQUIRE(Run({"sample", "--data", PopulationCsv(), "-n", "440", "--srs-size", "40", "-o", chosen}) == 0);
  CHECK(Run({"compare", "--data", PopulationCsv(), "--chosen", chosen, "--population-size", "4000",
             "--model-a", "nope", "-o", P("x.csv")}) == cli::kExitConfig);
  // Estimation without N.
  CHECK(Run({"estimate", "--data", PopulationCsv(), "--chosen", chosen, "-o", P("x.csv")}) ==
        cli::kExitConfig);
}

TEST_CASE("simulate writes a coverage report") {
  const std::string out = P("sim.csv");
  REQUIRE(Run({"simulate", "--scenario", "3", "-N", "4000", "-K", "3", "--outer", "10",
               "--inner", "2", "--oracle-replications", "5", "--training-size", "4000", "-o",
               out}) == 0);
  const std::string body = Body(Slurp(out));
  CHECK(std::count(body.begin(), body.end(), '\n') == 21);
  CHECK(body.rfind("scenario,N,treat_ratio,percentile,model1_cov", 0) == 0);
  CHECK(Run({"simulate", "--scenario", "9", "-o", out}) == cli::kExitConfig);
}
