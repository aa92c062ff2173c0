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

#include "nbuplift/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nbuplift/errors.hpp"

namespace nbuplift {
namespace {

// Running per-arm counts and outcome sums over a top-k prefix.
struct ArmTotals {
  std::int64_t treated_n = 0;
  std::int64_t control_n = 0;
  double treated_sum = 0.0;
  double control_sum = 0.0;

  void Add(int treatment, double outcome, std::int64_t copies = 1) {
    if (treatment == 1) {
      treated_n += copies;
      treated_sum += outcome * static_cast<double>(copies);
    } else {
      control_n += copies;
      control_sum += outcome * static_cast<double>(copies);
    }
  }

  std::optional<double> MeanDifference() const {
    if (treated_n == 0 || control_n == 0) return std::nullopt;
    return treated_sum / static_cast<double>(treated_n) -
           control_sum / static_cast<double>(control_n);
  }

  Gain GainAt(std::int64_t k) const {
    const auto diff = MeanDifference();
    if (!diff) return std::nullopt;
    return *diff * static_cast<double>(k);
  }

  Gain QiniAt() const {
    const auto diff = MeanDifference();
    if (!diff) return std::nullopt;
    return *diff * static_cast<double>(treated_n);
  }
};

void CheckModelIndex(const Dataset& units, std::size_t model_index) {
  if (model_index >= units.model_count()) {
    throw ConfigurationError("model index " + std::to_string(model_index) +
                             " out of range (dataset has " +
                             std::to_string(units.model_count()) + " models)");
  }
}

}  // namespace

Dataset::Dataset(std::vector<std::string> model_names)
    : model_names_(std::move(model_names)),
      scores_(model_names_.size()) {}

Dataset Dataset::FromColumns(std::vector<std::string> model_names,
                             std::vector<std::int64_t> ids,
                             std::vector<std::uint8_t> treatment,
                             std::vector<double> outcome,
                             std::vector<std::vector<double>> scores,
                             std::vector<std::uint8_t> observed) {
  const std::size_t n = ids.size();
  if (treatment.size() != n || outcome.size() != n) {
    throw ArgumentError("column lengths differ");
  }
  if (scores.size() != model_names.size()) {
    throw ArgumentError("score column count does not match model names");
  }
  for (const auto& column : scores) {
    if (column.size() != n) throw ArgumentError("score column length differs");
  }
  if (observed.empty()) observed.assign(n, 1);
  if (observed.size() != n) throw ArgumentError("observed column length differs");
  for (std::size_t i = 0; i < n; ++i) {
    if (treatment[i] > 1) {
      throw ArgumentError("treatment must be 0 or 1 (unit id " +
                          std::to_string(ids[i]) + ")");
    }
  }
  std::vector<std::int64_t> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("duplicate unit id " +
                        std::to_string(*std::adjacent_find(sorted.begin(),
                                                           sorted.end())));
  }

  Dataset d;
  d.model_names_ = std::move(model_names);
  d.ids_ = std::move(ids);
  d.treatment_ = std::move(treatment);
  d.outcome_ = std::move(outcome);
  d.scores_ = std::move(scores);
  d.observed_ = std::move(observed);
  return d;
}

void Dataset::Add(const UnitRecord& unit) {
  if (unit.treatment != 0 && unit.treatment != 1) {
    throw ArgumentError("treatment must be 0 or 1 (unit id " +
                        std::to_string(unit.id) + ")");
  }
  if (unit.scores.size() != model_count()) {
    throw ArgumentError("unit " + std::to_string(unit.id) + " has " +
                        std::to_string(unit.scores.size()) +
                        " scores, expected " + std::to_string(model_count()));
  }
  if (std::find(ids_.begin(), ids_.end(), unit.id) != ids_.end()) {
    throw ArgumentError("duplicate unit id " + std::to_string(unit.id));
  }
  ids_.push_back(unit.id);
  treatment_.push_back(static_cast<std::uint8_t>(unit.treatment));
  outcome_.push_back(unit.observed ? unit.outcome
                                   : std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s = 0; s < model_count(); ++s) {
    scores_[s].push_back(unit.scores[s]);
  }
  observed_.push_back(unit.observed ? 1 : 0);
}

std::optional<std::size_t> Dataset::ModelIndex(const std::string& name) const {
  const auto it = std::find(model_names_.begin(), model_names_.end(), name);
  if (it == model_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - model_names_.begin());
}

std::span<const double> Dataset::scores(std::size_t model) const {
  if (model >= scores_.size()) {
    throw ConfigurationError("model index " + std::to_string(model) +
                             " out of range");
  }
  return scores_[model];
}

bool Dataset::fully_observed() const {
  return std::all_of(observed_.begin(), observed_.end(),
                     [](std::uint8_t o) { return o != 0; });
}

UnitRecord Dataset::record(std::size_t position) const {
  UnitRecord r;
  r.id = ids_.at(position);
  r.treatment = treatment_[position];
  r.outcome = outcome_[position];
  r.observed = observed_[position] != 0;
  r.scores.reserve(model_count());
  for (const auto& column : scores_) r.scores.push_back(column[position]);
  return r;
}

Dataset Dataset::Subset(std::span<const std::size_t> positions) const {
  Dataset d(model_names_);
  d.ids_.reserve(positions.size());
  for (const std::size_t p : positions) {
    if (p >= size()) throw ArgumentError("subset position out of range");
    d.ids_.push_back(ids_[p]);
    d.treatment_.push_back(treatment_[p]);
    d.outcome_.push_back(outcome_[p]);
    d.observed_.push_back(observed_[p]);
    for (std::size_t s = 0; s < model_count(); ++s) {
      d.scores_[s].push_back(scores_[s][p]);
    }
  }
  return d;
}

std::vector<std::size_t> RankOrder(std::span<const double> scores,
                                   std::span<const std::int64_t> ids) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return order;
}

RankAssignment RankByModel(const Dataset& units, std::size_t model_index) {
  CheckModelIndex(units, model_index);
  RankAssignment out;
  out.model_index = model_index;
  out.order = RankOrder(units.scores(model_index), units.ids());
  out.ranks.resize(units.size());
  for (std::size_t r = 0; r < out.order.size(); ++r) {
    out.ranks[out.order[r]] = static_cast<std::int64_t>(r) + 1;
  }
  return out;
}

Gain CumulativeGain(std::span<const ArmOutcome> top_k, std::int64_t k) {
  if (k <= 0) throw ArgumentError("selection size k must be positive");
  if (static_cast<std::int64_t>(top_k.size()) != k) {
    throw ArgumentError("expected exactly k units in the top-k slice");
  }
  ArmTotals acc;
  for (const auto& u : top_k) acc.Add(u.treatment, u.outcome);
  return acc.GainAt(k);
}

Gain QiniValue(std::span<const ArmOutcome> top_k, std::int64_t k) {
  if (k <= 0) throw ArgumentError("selection size k must be positive");
  if (static_cast<std::int64_t>(top_k.size()) != k) {
    throw ArgumentError("expected exactly k units in the top-k slice");
  }
  ArmTotals acc;
  for (const auto& u : top_k) acc.Add(u.treatment, u.outcome);
  return acc.QiniAt();
}

std::int64_t SelectionSize(double percentile, std::int64_t population_size) {
  // The epsilon absorbs representation error in q * N / 100 for
  // non-integer percentiles; exact products are unaffected.
  const auto k = static_cast<std::int64_t>(
      std::floor(percentile * static_cast<double>(population_size) / 100.0 +
                 1e-9));
  return std::clamp<std::int64_t>(k, 1, std::max<std::int64_t>(1, population_size));
}

std::vector<double> DefaultPercentiles() {
  std::vector<double> out;
  for (int q = 5; q <= 100; q += 5) out.push_back(q);
  return out;
}

std::vector<GridPoint> MakeGrid(std::span<const double> percentiles,
                                std::int64_t population_size) {
  if (population_size <= 0) throw ArgumentError("empty population");
  if (percentiles.empty()) throw ArgumentError("empty percentile grid");
  std::vector<GridPoint> grid;
  grid.reserve(percentiles.size());
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    const double q = percentiles[i];
    if (!(q > 0.0 && q <= 100.0)) {
      throw ArgumentError("percentile " + std::to_string(q) +
                          " outside (0, 100]");
    }
    if (i > 0 && !(q > percentiles[i - 1])) {
      throw ArgumentError("percentiles must be strictly ascending");
    }
    grid.push_back({q, SelectionSize(q, population_size)});
  }
  return grid;
}

Gain UpliftCurve::MeanUplift(std::size_t i) const {
  if (!gains.at(i)) return std::nullopt;
  return *gains[i] / static_cast<double>(grid[i].k);
}

UpliftCurve BuildCurve(const Dataset& units, const RankAssignment& ranks,
                       std::span<const double> percentiles) {
  if (units.empty()) throw ArgumentError("cannot build a curve on no units");
  if (ranks.order.size() != units.size()) {
    throw ArgumentError("rank assignment does not cover the dataset");
  }
  if (!units.fully_observed()) {
    throw ArgumentError("curve construction needs fully observed units");
  }
  const auto n = static_cast<std::int64_t>(units.size());
  UpliftCurve curve;
  curve.grid = MakeGrid(percentiles, n);
  curve.gains.reserve(curve.grid.size());
  curve.qini.reserve(curve.grid.size());

  const auto treatment = units.treatment();
  const auto outcome = units.outcome();

  // Full-population totals are accumulated in position order so that every
  // ranking yields the same value at k = N.
  ArmTotals totals;
  for (std::size_t i = 0; i < units.size(); ++i) {
    totals.Add(treatment[i], outcome[i]);
  }

  ArmTotals acc;
  std::int64_t filled = 0;
  for (const auto& point : curve.grid) {
    if (point.k == n) {
      curve.gains.push_back(totals.GainAt(n));
      curve.qini.push_back(totals.QiniAt());
      continue;
    }
    while (filled < point.k) {
      const std::size_t pos = ranks.order[static_cast<std::size_t>(filled)];
      acc.Add(treatment[pos], outcome[pos]);
      ++filled;
    }
    curve.gains.push_back(acc.GainAt(point.k));
    curve.qini.push_back(acc.QiniAt());
  }
  return curve;
}

UpliftCurve BuildCurveFromCounts(std::span<const std::size_t> order,
                                 std::span<const std::int64_t> counts,
                                 std::span<const std::uint8_t> treatment,
                                 std::span<const double> outcome,
                                 std::span<const GridPoint> grid,
                                 bool with_qini) {
  ArmTotals totals;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    totals.Add(treatment[i], outcome[i], counts[i]);
    total += counts[i];
  }

  UpliftCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.gains.reserve(grid.size());
  if (with_qini) curve.qini.reserve(grid.size());

  ArmTotals acc;
  std::int64_t filled = 0;
  std::size_t j = 0;
  std::int64_t consumed = 0;  // copies of order[j] already in the prefix
  for (const auto& point : grid) {
    if (point.k > total) {
      throw ArgumentError("selection size exceeds pseudo-population size");
    }
    if (point.k == total) {
      curve.gains.push_back(totals.GainAt(total));
      if (with_qini) curve.qini.push_back(totals.QiniAt());
      continue;
    }
    while (filled < point.k) {
      const std::size_t idx = order[j];
      const std::int64_t left = counts[idx] - consumed;
      if (left == 0) {
        ++j;
        consumed = 0;
        continue;
      }
      const std::int64_t take = std::min(left, point.k - filled);
      acc.Add(treatment[idx], outcome[idx], take);
      filled += take;
      consumed += take;
      if (consumed == counts[idx]) {
        ++j;
        consumed = 0;
      }
    }
    curve.gains.push_back(acc.GainAt(point.k));
    if (with_qini) curve.qini.push_back(acc.QiniAt());
  }
  return curve;
}

UpliftCurve CurveDifference(const UpliftCurve& a, const UpliftCurve& b) {
  if (a.grid.size() != b.grid.size()) {
    throw ArgumentError("curve grids differ in length");
  }
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (a.grid[i].k != b.grid[i].k ||
        a.grid[i].percentile != b.grid[i].percentile) {
      throw ArgumentError("curve grids differ at point " + std::to_string(i));
    }
  }
  auto sub = [](const Gain& x, const Gain& y) -> Gain {
    if (!x || !y) return std::nullopt;
    return *x - *y;
  };
  UpliftCurve out;
  out.grid = a.grid;
  out.gains.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.gains.push_back(sub(a.gains[i], b.gains[i]));
  }
  if (a.qini.size() == a.size() && b.qini.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.qini.push_back(sub(a.qini[i], b.qini[i]));
    }
  }
  return out;
}

}  // namespace nbuplift
