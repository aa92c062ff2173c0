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
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nbuplift/errors.hpp"
#include "nbuplift/inclusion.hpp"
#include "nbuplift/io.hpp"
#include "test_support.hpp"

using namespace nbuplift;

namespace {

std::string Message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("dataset round trip keeps every bit") {
  Engine rng(1);
  auto data = testing::RandomDataset(300, 3, rng);
  std::ostringstream out;
  io::WriteDataset(out, data, {"seed=1", "config=abc"});
  const std::string text = out.str();
  CHECK(text.rfind("# seed=1\n# config=abc\nid,treatment,outcome,score_m1", 0) == 0);

  std::istringstream in(text);
  const auto back = io::ReadDataset(in);
  REQUIRE(back.size() == data.size());
  CHECK(back.model_names() == data.model_names());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.ids()[i] == data.ids()[i]);
    CHECK(back.treatment()[i] == data.treatment()[i]);
    CHECK(back.outcome()[i] == data.outcome()[i]);
    for (std::size_t s = 0; s < 3; ++s) CHECK(back.scores(s)[i] == data.scores(s)[i]);
  }
}

TEST_CASE("unobserved outcomes may be empty") {
  std::istringstream in(
      "id,treatment,outcome,score_a,observed\n"
      "1,1,,0.5,0\n"
      "2,0,1,0.25,1\n");
  const auto d = io::ReadDataset(in);
  CHECK(d.size() == 2);
  CHECK_FALSE(d.fully_observed());
  CHECK(std::isnan(d.outcome()[0]));
}

TEST_CASE("schema errors carry line numbers") {
  const auto bad_header = Message([] {
    std::istringstream in("id,arm,outcome,score_a\n1,1,0,0.5\n");
    io::ReadDataset(in);
  });
  CHECK(bad_header.find("line 1") != std::string::npos);

  const auto bad_treatment = Message([] {
    std::istringstream in("# comment\nid,treatment,outcome,score_a\n1,1,0,0.5\n2,3,0,0.1\n");
    io::ReadDataset(in);
  });
  CHECK(bad_treatment.find("line 4") != std::string::npos);

  const auto short_row = Message([] {
    std::istringstream in("id,treatment,outcome,score_a\n1,1,0\n");
    io::ReadDataset(in);
  });
  CHECK(short_row.find("line 2") != std::string::npos);

  const auto not_number = Message([] {
    std::istringstream in("id,treatment,outcome,score_a\n1,1,0,abc\n");
    io::ReadDataset(in);
  });
  CHECK(not_number.find("line 2") != std::string::npos);

  std::istringstream empty("");
  CHECK_THROWS_AS(io::ReadDataset(empty), SchemaError);
}

TEST_CASE("chosen-set round trip") {
  Engine rng(2);
  const auto data = testing::RandomDataset(200, 2, rng);
  const std::vector<RankAssignment> ranks = {RankByModel(data, 0), RankByModel(data, 1)};
  const auto design = ValidateDesign({200, 40, 20, {90, 90}});
  auto chosen = TwoStepSample(data, design, ranks, rng);
  AssignInclusion(chosen, ComputeInclusionTable(ranks, design));

  std::ostringstream out;
  io::WriteChosenSet(out, chosen);
  std::istringstream in(out.str());
  const auto rows = io::ReadChosenSet(in);
  REQUIRE(rows.size() == chosen.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = chosen.members[i];
    CHECK(rows[i].id == m.id);
    CHECK(rows[i].provenance == m.provenance);
    CHECK(rows[i].sub_universe == m.sub_universe);
    REQUIRE(rows[i].p_inclusion.has_value());
    CHECK(*rows[i].p_inclusion == m.p_inclusion);
  }
}

TEST_CASE("a chosen set without inclusion probabilities is refused") {
  const auto missing_column = Message([] {
    std::istringstream in("id,provenance\n1,SRS\n");
    io::ReadChosenSet(in);
  });
  CHECK(missing_column.find("p_inclusion") != std::string::npos);
  CHECK(missing_column.find("nbuplift sample") != std::string::npos);

  const auto empty_value = Message([] {
    std::istringstream in("id,provenance,sub_universe,p_inclusion\n1,SRS,,0.5\n2,RANKED,1,\n");
    io::ReadChosenSet(in);
  });
  CHECK(empty_value.find("line 3") != std::string::npos);

  const auto out_of_range = Message([] {
    std::istringstream in("id,p_inclusion\n1,1.5\n");
    io::ReadChosenSet(in);
  });
  CHECK(out_of_range.find("line 2") != std::string::npos);
}

TEST_CASE("design JSON round trip") {
  const SamplingDesign d{20, 8, 2, {9, 9}};
  const std::string text = io::DesignToJson(d, 77);
  std::uint64_t seed = 0;
  const auto back = io::DesignFromJson(text, &seed);
  CHECK(back.population_size == 20);
  CHECK(back.sample_size == 8);
  CHECK(back.srs_size == 2);
  CHECK(back.sub_sizes == d.sub_sizes);
  CHECK(seed == 77);

  const auto by_count = io::DesignFromJson(R"({"N": 20, "n": 8, "n_r": 2, "S0": 2})", nullptr);
  CHECK(by_count.sub_sizes == std::vector<std::int64_t>{9, 9});
  const auto single = io::DesignFromJson(R"({"N": 100, "n": 20, "n_r": 5})", nullptr);
  CHECK(single.sub_sizes == std::vector<std::int64_t>{95});

  CHECK_THROWS_AS(io::DesignFromJson("{", nullptr), SchemaError);
  CHECK_THROWS_AS(io::DesignFromJson(R"({"N": 20, "n": 8})", nullptr), SchemaError);
  CHECK_THROWS_AS(
      io::DesignFromJson(R"({"N": 20, "n": 8, "n_r": 2, "S0": 3, "sub_sizes": [9, 9]})",
                         nullptr),
      SchemaError);
}

TEST_CASE("verdicts") {
  CHECK(io::Classify({0.1, 0.2, 0.3, false}) == io::Verdict::kAboveZero);
  CHECK(io::Classify({-0.3, -0.2, -0.1, false}) == io::Verdict::kBelowZero);
  CHECK(io::Classify({-0.1, 0.2, 0.3, false}) == io::Verdict::kInconclusive);
  CHECK(io::Classify({0.0, 0.0, 0.0, false}) == io::Verdict::kInconclusive);
  CHECK(io::Classify({0, 0, 0, true}) == io::Verdict::kMissing);
  CHECK(std::string(io::VerdictName(io::Verdict::kAboveZero)) == "ABOVE_ZERO");
}

TEST_CASE("difference band CSV") {
  CurveBand band;
  band.grid = MakeGrid(std::vector<double>{50, 100}, 10);
  band.points = {{0.5, 1.0, 2.0, false}, {0, 0, 0, true}};
  std::ostringstream out;
  io::WriteDifferenceBand(out, "a", "b", band, {"seed=3"});
  CHECK(out.str() ==
        "# seed=3\n"
        "model_a,model_b,percentile,k,lower,median,upper,verdict\n"
        "a,b,50,5,0.5,1,2,ABOVE_ZERO\n"
        "a,b,100,10,,,,MISSING\n");
}

TEST_CASE("number formatting and hashing") {
  const double x = 0.1 + 0.2;
  CHECK(std::stod(io::FormatDouble(x)) == x);
  CHECK(io::FormatDouble(2.0) == "2");
  CHECK(io::Fnv1aHex("") == "cbf29ce484222325");
  CHECK(io::Fnv1aHex("a") == "af63dc4c8601ec8c");
}
