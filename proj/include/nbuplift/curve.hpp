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

#ifndef NBUPLIFT_CURVE_HPP_
#define NBUPLIFT_CURVE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nbuplift {

// A gain value that is absent when one treatment arm is empty in the slice.
using Gain = std::optional<double>;

struct UnitRecord {
  std::int64_t id = 0;
  int treatment = 0;  // 0 = control, 1 = treated
  double outcome = 0.0;
  std::vector<double> scores;  // higher score = higher predicted uplift
  bool observed = true;
};

// Column-oriented unit table. Every unit carries one score per model; ids are
// unique. Unobserved units store a NaN outcome.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<std::string> model_names);

  // Bulk construction; validates every invariant once.
  static Dataset FromColumns(std::vector<std::string> model_names,
                             std::vector<std::int64_t> ids,
                             std::vector<std::uint8_t> treatment,
                             std::vector<double> outcome,
                             std::vector<std::vector<double>> scores,
                             std::vector<std::uint8_t> observed = {});

  void Add(const UnitRecord& unit);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t model_count() const { return model_names_.size(); }
  const std::vector<std::string>& model_names() const { return model_names_; }
  std::optional<std::size_t> ModelIndex(const std::string& name) const;

  std::span<const std::int64_t> ids() const { return ids_; }
  std::span<const std::uint8_t> treatment() const { return treatment_; }
  std::span<const double> outcome() const { return outcome_; }
  std::span<const double> scores(std::size_t model) const;
  std::span<const std::uint8_t> observed() const { return observed_; }
  bool fully_observed() const;

  UnitRecord record(std::size_t position) const;

  // Rows at `positions`, in that order.
  Dataset Subset(std::span<const std::size_t> positions) const;

 private:
  std::vector<std::string> model_names_;
  std::vector<std::int64_t> ids_;
  std::vector<std::uint8_t> treatment_;
  std::vector<double> outcome_;
  std::vector<std::vector<double>> scores_;  // [model][unit]
  std::vector<std::uint8_t> observed_;
};

// Ranks of every unit under one model. ranks[pos] is the 1-based rank of the
// unit at dataset position pos; order[r - 1] is the position holding rank r.
struct RankAssignment {
  std::size_t model_index = 0;
  std::vector<std::int64_t> ranks;
  std::vector<std::size_t> order;
};

// Descending score; equal scores ordered by ascending id.
RankAssignment RankByModel(const Dataset& units, std::size_t model_index);

// Rank ordering for raw columns, same convention as RankByModel.
std::vector<std::size_t> RankOrder(std::span<const double> scores,
                                   std::span<const std::int64_t> ids);

struct ArmOutcome {
  int treatment = 0;
  double outcome = 0.0;
};

// (mean treated outcome - mean control outcome) * k over exactly k units.
Gain CumulativeGain(std::span<const ArmOutcome> top_k, std::int64_t k);

// Qini measure: CumulativeGain scaled by the treated share of the top k.
Gain QiniValue(std::span<const ArmOutcome> top_k, std::int64_t k);

struct GridPoint {
  double percentile = 0.0;
  std::int64_t k = 0;
};

// max(1, floor(q * N / 100)).
std::int64_t SelectionSize(double percentile, std::int64_t population_size);

// 5, 10, ..., 100.
std::vector<double> DefaultPercentiles();

// Percentiles must lie in (0, 100] and be strictly ascending. Selection sizes
// are non-decreasing; on very small N neighbouring percentiles can share k.
std::vector<GridPoint> MakeGrid(std::span<const double> percentiles,
                                std::int64_t population_size);

struct UpliftCurve {
  std::vector<GridPoint> grid;
  std::vector<Gain> gains;
  std::vector<Gain> qini;  // empty when not computed

  std::size_t size() const { return grid.size(); }
  Gain MeanUplift(std::size_t i) const;
};

UpliftCurve BuildCurve(const Dataset& units, const RankAssignment& ranks,
                       std::span<const double> percentiles);

// Curve of a population in which unit `order[j]` appears counts[order[j]]
// times, visited in the given rank order. Units with zero count are skipped.
// Sizes in `grid` are taken relative to the total count.
UpliftCurve BuildCurveFromCounts(std::span<const std::size_t> order,
                                 std::span<const std::int64_t> counts,
                                 std::span<const std::uint8_t> treatment,
                                 std::span<const double> outcome,
                                 std::span<const GridPoint> grid,
                                 bool with_qini = false);

// Pointwise a - b; missing values propagate.
UpliftCurve CurveDifference(const UpliftCurve& a, const UpliftCurve& b);

struct BandPoint {
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;
  bool missing = false;
};

struct CurveBand {
  std::vector<GridPoint> grid;
  std::vector<BandPoint> points;
  double alpha = 0.05;
  std::vector<std::string> warnings;
};

}  // namespace nbuplift

#endif  // NBUPLIFT_CURVE_HPP_
