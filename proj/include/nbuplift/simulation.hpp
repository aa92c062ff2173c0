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

#ifndef NBUPLIFT_SIMULATION_HPP_
#define NBUPLIFT_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbuplift/curve.hpp"
#include "nbuplift/random.hpp"

namespace nbuplift {

enum class DgpForm {
  // f = a [X1^2 - 0.2 I(X2 > 0)] T - 0.8 I(X3 > 0) + 0.8 X4 - 0.4 X5^2 + e - 3
  kNonlinear,
  // f = a (0.2 + 0.5 X1 - 0.25 X2) T + 0.8 X4 - 0.4 X5 + e - 2
  kLinear,
};

// Binary-outcome data-generating process: P(Y = 1) = logistic(f(X, e, T)),
// X ~ MVN(0, 0.2 J + 0.8 I) in `covariates` dimensions, e ~ N(0, sigma^2).
struct DgpSpec {
  std::int64_t population_size = 20000;
  int covariates = 40;
  double sigma = 1.0;
  double treat_ratio = 0.5;
  double effect_scale = 2.0;  // the treatment coefficient a; 0 removes the effect
  DgpForm form = DgpForm::kNonlinear;
  std::uint64_t seed = 0;
};

void ValidateDgp(const DgpSpec& spec);

struct Population {
  std::size_t size = 0;
  std::size_t covariates = 0;
  std::vector<double> x;  // row-major, size * covariates
  std::vector<double> noise;
  std::vector<double> p_treated;  // P(Y = 1 | T = 1) per unit
  std::vector<double> p_control;  // P(Y = 1 | T = 0) per unit
  std::vector<std::uint8_t> treatment;
  std::vector<double> outcome;

  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * covariates, covariates};
  }
  double true_uplift(std::size_t i) const { return p_treated[i] - p_control[i]; }
};

// Covariates use the one-factor form X_q = sqrt(0.2) Z_0 + sqrt(0.8) Z_q,
// which has exactly the target covariance. Draw order per unit: Z_0, Z_1..Z_Q,
// e; then the treatment allocation; then outcomes.
Population GeneratePopulation(const DgpSpec& spec, Engine& rng);
Population GeneratePopulation(const DgpSpec& spec);

// Logistic S-learner on features (1, x, t, t * x), trained by full-batch
// gradient descent with Adam steps. Predicted uplift is p(x, 1) - p(x, 0).
class LogisticSLearner {
 public:
  struct Options {
    int iterations = 400;
    double learning_rate = 0.05;
    double l2 = 1e-4;
  };

  LogisticSLearner() = default;

  // Throws EstimationError if the loss becomes non-finite.
  static LogisticSLearner Fit(const Population& train, const Options& options);
  static LogisticSLearner Fit(const Population& train) {
    return Fit(train, Options{});
  }

  double PredictUplift(std::span<const double> x) const;
  const std::vector<double>& weights() const { return weights_; }
  double final_loss() const { return final_loss_; }

 private:
  std::vector<double> weights_;  // [bias, x..., t, t*x...]
  double final_loss_ = 0.0;
};

// Two rankers of different quality standing in for pre-trained models:
// model_1 scores true uplift plus Gaussian noise, model_2 is the S-learner.
struct BuiltinScorers {
  LogisticSLearner learner;
  double oracle_noise_sd = 0.1;
};

inline constexpr double kDefaultOracleNoiseSd = 0.1;
inline constexpr std::int64_t kDefaultTrainingSize = 20000;

// Trains the S-learner on a population drawn independently of any
// evaluation population (its own seed stream under `seed`).
BuiltinScorers TrainBuiltinScorers(const DgpSpec& spec,
                                   std::int64_t training_size,
                                   double oracle_noise_sd, std::uint64_t seed);

// Score columns [model][unit]; noise for model_1 comes from `noise_rng`.
std::vector<std::vector<double>> ScorePopulation(const BuiltinScorers& scorers,
                                                 const Population& population,
                                                 Engine& noise_rng);

// Fully observed dataset with ids 1..N and the given score columns.
Dataset PopulationDataset(const Population& population,
                          std::vector<std::vector<double>> scores,
                          std::vector<std::string> model_names = {"model_1",
                                                                  "model_2"});

}  // namespace nbuplift

#endif  // NBUPLIFT_SIMULATION_HPP_
