// Copyright 2026 The eqtrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EQTRACK_RNG_HPP_
#define EQTRACK_RNG_HPP_

#include <cstdint>
#include <span>

namespace eqtrack {

// Counter-based random numbers. Every draw is a pure function of
// (seed, replication, stream, period), so a trace never depends on how many
// draws other players made or on the order workers finish.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replication)
      : key_(mix64(mix64(seed) ^ mix64(replication + 0x51ed270b27eb5cbfULL))) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t period,
                     std::uint64_t draw = 0) const {
    return mix64(mix64(mix64(key_ ^ (stream * 0xd1b54a32d192ed03ULL)) ^ period) ^
                 draw);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t period,
                 std::uint64_t draw = 0) const {
    return static_cast<double>(bits(stream, period, draw) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Inverse-CDF draw from a probability vector. Falls through to the last
// index with positive mass so round-off in the cumulative sum never yields an
// action with zero probability.
inline int sample_index(std::span<const double> probabilities, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cumulative += probabilities[k];
    if (u < cumulative) return static_cast<int>(k);
  }
  return last_positive;
}

}  // namespace eqtrack

#endif  // EQTRACK_RNG_HPP_
