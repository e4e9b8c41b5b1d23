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

#ifndef EQTRACK_TRACE_HPP_
#define EQTRACK_TRACE_HPP_

#include <cstdint>
#include <vector>

namespace eqtrack {

// One played episode. Periods are 1-based in the API and 0-based in storage.
struct RunTrace {
  int num_players = 0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::vector<int> outcomes;               // outcomes[t - 1]
  std::vector<double> payoffs;             // payoffs[(t - 1) * N + i], realized
  std::vector<std::vector<double>> mixed;  // optional diagnostics, per period then player

  int horizon() const { return static_cast<int>(outcomes.size()); }
  int outcome(int t) const { return outcomes[t - 1]; }
  double payoff(int t, int player) const {
    return payoffs[static_cast<std::size_t>(t - 1) * num_players + player];
  }
};

}  // namespace eqtrack

#endif  // EQTRACK_TRACE_HPP_
