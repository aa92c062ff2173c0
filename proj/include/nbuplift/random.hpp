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

#ifndef NBUPLIFT_RANDOM_HPP_
#define NBUPLIFT_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace nbuplift {

// All randomness flows through mt19937_64 (its output sequence is fixed by
// the standard) and the mapping helpers below (fixed by this file), so a seed
// reproduces the same draws on every platform.
using Engine = std::mt19937_64;

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream domains keep independent consumers of one master seed apart.
enum class StreamDomain : std::uint64_t {
  kSampling = 1,
  kTreatment = 2,
  kBootstrap = 3,
  kPopulation = 4,
  kScorerTraining = 5,
  kOracle = 6,
  kReplication = 7,
  kScoreNoise = 8,
};

// Counter-based split: the seed of stream `index` depends only on
// (master, domain, index), never on how many other streams were consumed.
inline std::uint64_t DeriveSeed(std::uint64_t master, StreamDomain domain,
                                std::uint64_t index) {
  std::uint64_t h = SplitMix64(master);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(domain));
  return SplitMix64(h ^ SplitMix64(index));
}

inline Engine MakeStream(std::uint64_t master, StreamDomain domain,
                         std::uint64_t index = 0) {
  return Engine(DeriveSeed(master, domain, index));
}

__extension__ using Uint128 = unsigned __int128;
__extension__ using Int128 = __int128;

// Uniform double in [0, 1) with 53 random bits.
inline double Uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound), unbiased (Lemire's multiply-shift with
// rejection). bound must be positive.
inline std::uint64_t UniformIndex(Engine& rng, std::uint64_t bound) {
  Uint128 m = static_cast<Uint128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<Uint128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Marsaglia polar method; caches the second variate of each pair.
class NormalSource {
 public:
  double operator()(Engine& rng) {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * Uniform01(rng) - 1.0;
      v = 2.0 * Uniform01(rng) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

 private:
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace nbuplift

#endif  // NBUPLIFT_RANDOM_HPP_
