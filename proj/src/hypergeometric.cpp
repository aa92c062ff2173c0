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

#include "nbuplift/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nbuplift/errors.hpp"

namespace nbuplift {
namespace {

constexpr double kLn2Pi = 1.837877066409345483560659472811;
constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailCut = 1e-16;

// stirlerr(n) = log(n!) - log(sqrt(2 pi n) (n / e)^n).
double StirlingError(double n) {
  static constexpr double kHalves[31] = {
      0.0,  // n = 0, unused
      0.1534264097200273452913848,   0.0810614667953272582196702,
      0.0548141210519176538961390,   0.0413406959554092940938221,
      0.03316287351993628748511048,  0.02767792568499833914878929,
      0.02374616365629749597132920,  0.02079067210376509311152277,
      0.01848845053267318523077934,  0.01664469118982119216319487,
      0.01513497322191737887351255,  0.01387612882307074799874573,
      0.01281046524292022692424986,  0.01189670994589177009505572,
      0.01110455975820691732662991,  0.010411265261972096497478567,
      0.009799416126158803298389475, 0.009255462182712732917728637,
      0.008768700134139385462952823, 0.008330563433362871256469318,
      0.007934114564314020547248100, 0.007573675487951840794972024,
      0.007244554301320383179543912, 0.006942840107209529865664152,
      0.006665247032707682442354394, 0.006408994188004207068439631,
      0.006171712263039457647532867, 0.005951370112758847735624416,
      0.005746216513010115682023589, 0.005554733551962801371038690,
  };
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;

  if (n <= 15.0) {
    const double nn = n + n;
    if (nn == std::floor(nn)) return kHalves[static_cast<int>(nn)];
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term bd0(x, np) = x log(x / np) + np - x, with a series for
// x close to np where the direct form cancels.
double Bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    if (std::fabs(s) < std::numeric_limits<double>::min()) return s;
    double ej = 2 * x * v;
    v = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / ((j << 1) + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

// log of the Binomial(n, p) mass at x, for integer-valued x and n.
double LogBinomialRaw(double x, double n, double p, double q) {
  if (p == 0) return x == 0 ? 0.0 : kNegInf;
  if (q == 0) return x == n ? 0.0 : kNegInf;
  if (x == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -Bd0(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) return q < 0.1 ? -Bd0(n, n * p) - n * q : n * std::log(p);
  if (x < 0 || x > n) return kNegInf;
  const double lc = StirlingError(n) - StirlingError(x) - StirlingError(n - x) -
                    Bd0(x, n * p) - Bd0(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

void Validate(const HypergeomParams& p) {
  if (p.population < 0 || p.successes < 0 || p.successes > p.population ||
      p.draws < 0 || p.draws > p.population) {
    throw ArgumentError("invalid hypergeometric parameters (N=" +
                        std::to_string(p.population) +
                        ", K=" + std::to_string(p.successes) +
                        ", n=" + std::to_string(p.draws) + ")");
  }
}

double LogPmfUnchecked(std::int64_t N, std::int64_t K, std::int64_t n,
                       std::int64_t k) {
  const std::int64_t lo = std::max<std::int64_t>(0, n - (N - K));
  const std::int64_t hi = std::min(K, n);
  if (k < lo || k > hi) return kNegInf;
  if (n == 0) return 0.0;
  const double dN = static_cast<double>(N);
  const double p = static_cast<double>(n) / dN;
  const double q = static_cast<double>(N - n) / dN;
  const double a = LogBinomialRaw(static_cast<double>(k),
                                  static_cast<double>(K), p, q);
  const double b = LogBinomialRaw(static_cast<double>(n - k),
                                  static_cast<double>(N - K), p, q);
  const double c = LogBinomialRaw(static_cast<double>(n), dN, p, q);
  return a + b - c;
}

// P(X <= x) for x at or below the mean. Starts from the mass at x and walks
// down the support via the ratio pmf(j - 1) / pmf(j); terms shrink away from
// the mode, so the walk stops once they drop below kTailCut of the sum.
double LowerTail(std::int64_t N, std::int64_t K, std::int64_t n,
                 std::int64_t x) {
  const double mass = std::exp(LogPmfUnchecked(N, K, n, x));
  if (mass == 0.0) return 0.0;
  const std::int64_t lo = std::max<std::int64_t>(0, n - (N - K));
  double sum = 1.0;
  double term = 1.0;
  for (std::int64_t j = x; j > lo; --j) {
    const double jd = static_cast<double>(j);
    term *= jd * static_cast<double>(N - K - n + j) /
            (static_cast<double>(n + 1 - j) * static_cast<double>(K + 1 - j));
    sum += term;
    if (term < kTailCut * sum) break;
  }
  return mass * sum;
}

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::int64_t SupportMin(const HypergeomParams& p) {
  return std::max<std::int64_t>(0, p.draws - (p.population - p.successes));
}

std::int64_t SupportMax(const HypergeomParams& p) {
  return std::min(p.successes, p.draws);
}

double HypergeomLogPmf(const HypergeomParams& p, std::int64_t k) {
  Validate(p);
  return LogPmfUnchecked(p.population, p.successes, p.draws, k);
}

double HypergeomCdf(const HypergeomParams& p, std::int64_t upper) {
  Validate(p);
  if (upper < SupportMin(p)) return 0.0;
  if (upper >= SupportMax(p)) return 1.0;
  const std::int64_t N = p.population, K = p.successes, n = p.draws;
  // Sum whichever tail lies on the far side of the mean from the mode.
  if (static_cast<double>(upper) * static_cast<double>(N) >
      static_cast<double>(n) * static_cast<double>(K)) {
    return Clamp01(1.0 - LowerTail(N, N - K, n, n - upper - 1));
  }
  return Clamp01(LowerTail(N, K, n, upper));
}

double HypergeomSf(const HypergeomParams& p, std::int64_t k) {
  Validate(p);
  if (k < SupportMin(p)) return 1.0;
  if (k >= SupportMax(p)) return 0.0;
  const std::int64_t N = p.population, K = p.successes, n = p.draws;
  if (static_cast<double>(k) * static_cast<double>(N) >=
      static_cast<double>(n) * static_cast<double>(K)) {
    // P(X >= k + 1) = P(n - X <= n - k - 1), n - X ~ HG(N, N - K, n).
    return Clamp01(LowerTail(N, N - K, n, n - k - 1));
  }
  return Clamp01(1.0 - LowerTail(N, K, n, k));
}

}  // namespace nbuplift
