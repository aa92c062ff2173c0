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

#include "nbuplift/simulation.hpp"

#include <cmath>
#include <numeric>

#include "nbuplift/design.hpp"
#include "nbuplift/errors.hpp"

namespace nbuplift {
namespace {

double Logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double LinkValue(const DgpSpec& spec, std::span<const double> x, double noise,
                 int t) {
  const double a = spec.effect_scale;
  if (spec.form == DgpForm::kLinear) {
    return a * (0.2 + 0.5 * x[0] - 0.25 * x[1]) * t + 0.8 * x[3] -
           0.4 * x[4] + noise - 2.0;
  }
  const double effect = x[0] * x[0] - 0.2 * (x[1] > 0 ? 1.0 : 0.0);
  return a * effect * t - 0.8 * (x[2] > 0 ? 1.0 : 0.0) + 0.8 * x[3] -
         0.4 * x[4] * x[4] + noise - 3.0;
}

}  // namespace

void ValidateDgp(const DgpSpec& spec) {
  if (spec.population_size <= 0) throw ArgumentError("population size must be positive");
  if (spec.covariates < 5) throw ArgumentError("the outcome model needs at least 5 covariates");
  if (!(spec.sigma > 0.0)) throw ArgumentError("sigma must be positive");
  if (!(spec.treat_ratio > 0.0 && spec.treat_ratio < 1.0)) {
    throw ArgumentError("treatment ratio must lie in (0, 1)");
  }
}

Population GeneratePopulation(const DgpSpec& spec, Engine& rng) {
  ValidateDgp(spec);
  const auto N = static_cast<std::size_t>(spec.population_size);
  const auto Q = static_cast<std::size_t>(spec.covariates);
  Population pop;
  pop.size = N;
  pop.covariates = Q;
  pop.x.resize(N * Q);
  pop.noise.resize(N);
  pop.p_treated.resize(N);
  pop.p_control.resize(N);
  pop.outcome.resize(N);

  const double shared = std::sqrt(0.2);
  const double own = std::sqrt(0.8);
  NormalSource normal;
  for (std::size_t i = 0; i < N; ++i) {
    const double z0 = normal(rng);
    double* row = pop.x.data() + i * Q;
    for (std::size_t q = 0; q < Q; ++q) row[q] = shared * z0 + own * normal(rng);
    pop.noise[i] = spec.sigma * normal(rng);
    const std::span<const double> xs(row, Q);
    pop.p_treated[i] = Logistic(LinkValue(spec, xs, pop.noise[i], 1));
    pop.p_control[i] = Logistic(LinkValue(spec, xs, pop.noise[i], 0));
  }
  pop.treatment = AllocateTreatment(N, spec.treat_ratio, rng);
  for (std::size_t i = 0; i < N; ++i) {
    const double p = pop.treatment[i] ? pop.p_treated[i] : pop.p_control[i];
    pop.outcome[i] = Uniform01(rng) < p ? 1.0 : 0.0;
  }
  return pop;
}

Population GeneratePopulation(const DgpSpec& spec) {
  Engine rng = MakeStream(spec.seed, StreamDomain::kPopulation);
  return GeneratePopulation(spec, rng);
}

LogisticSLearner LogisticSLearner::Fit(const Population& train,
                                       const Options& options) {
  const std::size_t N = train.size;
  const std::size_t Q = train.covariates;
  if (N == 0) throw ArgumentError("empty training population");
  const std::size_t P = 2 * Q + 2;
  const std::size_t t_offset = Q + 1;

  LogisticSLearner model;
  model.weights_.assign(P, 0.0);
  std::vector<double>& w = model.weights_;
  std::vector<double> grad(P), m(P, 0.0), v(P, 0.0);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double inv_n = 1.0 / static_cast<double>(N);

  double loss = 0.0;
  for (int it = 1; it <= options.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    loss = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double* x = train.x.data() + i * Q;
      const double t = train.treatment[i];
      double z = w[0];
      for (std::size_t q = 0; q < Q; ++q) z += w[1 + q] * x[q];
      if (t != 0.0) {
        z += w[t_offset];
        for (std::size_t q = 0; q < Q; ++q) z += w[t_offset + 1 + q] * x[q];
      }
      const double y = train.outcome[i];
      loss += Softplus(z) - y * z;
      const double r = Logistic(z) - y;
      grad[0] += r;
      for (std::size_t q = 0; q < Q; ++q) grad[1 + q] += r * x[q];
      if (t != 0.0) {
        grad[t_offset] += r;
        for (std::size_t q = 0; q < Q; ++q) grad[t_offset + 1 + q] += r * x[q];
      }
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < P; ++j) penalty += w[j] * w[j];
    loss = loss * inv_n + 0.5 * options.l2 * penalty;
    if (!std::isfinite(loss)) {
      throw EstimationError("S-learner training diverged (non-finite loss)");
    }
    const double c1 = 1.0 - std::pow(beta1, it);
    const double c2 = 1.0 - std::pow(beta2, it);
    for (std::size_t j = 0; j < P; ++j) {
      const double g = grad[j] * inv_n + options.l2 * w[j];
      m[j] = beta1 * m[j] + (1 - beta1) * g;
      v[j] = beta2 * v[j] + (1 - beta2) * g * g;
      w[j] -= options.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps);
    }
  }
  for (const double wj : w) {
    if (!std::isfinite(wj)) {
      throw EstimationError("S-learner training diverged (non-finite weight)");
    }
  }
  model.final_loss_ = loss;
  return model;
}

double LogisticSLearner::PredictUplift(std::span<const double> x) const {
  const std::size_t Q = x.size();
  if (weights_.size() != 2 * Q + 2) {
    throw ArgumentError("covariate count does not match the trained model");
  }
  double base = weights_[0];
  double shift = weights_[Q + 1];
  for (std::size_t q = 0; q < Q; ++q) {
    base += weights_[1 + q] * x[q];
    shift += weights_[Q + 2 + q] * x[q];
  }
  return Logistic(base + shift) - Logistic(base);
}

BuiltinScorers TrainBuiltinScorers(const DgpSpec& spec,
                                   std::int64_t training_size,
                                   double oracle_noise_sd, std::uint64_t seed) {
  if (oracle_noise_sd < 0.0) throw ArgumentError("noise sd must be >= 0");
  DgpSpec train_spec = spec;
  train_spec.population_size = training_size;
  Engine rng = MakeStream(seed, StreamDomain::kScorerTraining);
  const Population train = GeneratePopulation(train_spec, rng);
  BuiltinScorers out;
  out.learner = LogisticSLearner::Fit(train);
  out.oracle_noise_sd = oracle_noise_sd;
  return out;
}

std::vector<std::vector<double>> ScorePopulation(const BuiltinScorers& scorers,
                                                 const Population& population,
                                                 Engine& noise_rng) {
  const std::size_t N = population.size;
  std::vector<std::vector<double>> scores(2, std::vector<double>(N));
  NormalSource normal;
  for (std::size_t i = 0; i < N; ++i) {
    const double noise =
        scorers.oracle_noise_sd > 0 ? scorers.oracle_noise_sd * normal(noise_rng) : 0.0;
    scores[0][i] = population.true_uplift(i) + noise;
    scores[1][i] = scorers.learner.PredictUplift(population.row(i));
  }
  return scores;
}

Dataset PopulationDataset(const Population& population,
                          std::vector<std::vector<double>> scores,
                          std::vector<std::string> model_names) {
  std::vector<std::int64_t> ids(population.size);
  std::iota(ids.begin(), ids.end(), std::int64_t{1});
  return Dataset::FromColumns(std::move(model_names), std::move(ids),
                              population.treatment, population.outcome,
                              std::move(scores));
}

}  // namespace nbuplift
