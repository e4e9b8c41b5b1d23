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

#ifndef EQTRACK_WELFARE_HPP_
#define EQTRACK_WELFARE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "eqtrack/equilibrium.hpp"
#include "eqtrack/errors.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/oracles.hpp"

namespace eqtrack {

// Welfare W(a) over outcomes. Payoffs are shifted by `shift` (M when the game
// has negative payoffs, else 0) before additive or minimum aggregation.
struct WelfareFunction {
  enum class Kind { kAdditive, kMinimum, kTable };
  Kind kind = Kind::kAdditive;
  std::vector<double> table;

  static WelfareFunction additive() { return {Kind::kAdditive, {}}; }
  static WelfareFunction minimum() { return {Kind::kMinimum, {}}; }
  static WelfareFunction from_table(std::vector<double> values) {
    for (double v : values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ArgumentError("welfare table entries must be finite and non-negative");
      }
    }
    return {Kind::kTable, std::move(values)};
  }
};

inline std::string to_string(WelfareFunction::Kind kind) {
  switch (kind) {
    case WelfareFunction::Kind::kAdditive: return "additive";
    case WelfareFunction::Kind::kMinimum: return "minimum";
    case WelfareFunction::Kind::kTable: return "table";
  }
  return "?";
}

inline WelfareFunction parse_welfare(const std::string& s) {
  if (s == "additive") return WelfareFunction::additive();
  if (s == "minimum" || s == "min") return WelfareFunction::minimum();
  throw ArgumentError("unknown welfare kind '" + s + "'");
}

inline double payoff_shift(const StageGame& game) {
  for (const auto& row : game.payoffs()) {
    for (double v : row) {
      if (v < 0.0) return game.bound();
    }
  }
  return 0.0;
}

inline double payoff_shift(const GameSequence& seq) {
  double shift = 0.0;
  for (const Segment& s : seq.segments()) {
    if (payoff_shift(s.game) > 0.0) shift = seq.bound();
  }
  return shift;
}

inline double welfare_value(const StageGame& game, const WelfareFunction& w, int outcome,
                            double shift) {
  switch (w.kind) {
    case WelfareFunction::Kind::kTable:
      if (static_cast<int>(w.table.size()) != game.space().outcome_count()) {
        throw ArgumentError("welfare table size does not match the outcome count");
      }
      return w.table[outcome];
    case WelfareFunction::Kind::kAdditive: {
      double total = 0.0;
      for (int i = 0; i < game.num_players(); ++i) total += game.payoff(i, outcome) + shift;
      return total;
    }
    case WelfareFunction::Kind::kMinimum: {
      double low = std::numeric_limits<double>::infinity();
      for (int i = 0; i < game.num_players(); ++i) low = std::min(low, game.payoff(i, outcome) + shift);
      return low;
    }
  }
  return 0.0;
}

inline std::vector<double> welfare_table(const StageGame& game, const WelfareFunction& w,
                                         double shift) {
  std::vector<double> out(game.space().outcome_count());
  for (int a = 0; a < game.space().outcome_count(); ++a) out[a] = welfare_value(game, w, a, shift);
  return out;
}

inline double optimal_welfare(const GameSequence& seq, const WelfareFunction& w) {
  const double shift = payoff_shift(seq);
  double total = 0.0;
  for (const Segment& s : seq.segments()) {
    const auto table = welfare_table(s.game, w, shift);
    total += s.length * *std::max_element(table.begin(), table.end());
  }
  return total;
}

// w / 0 = inf for w > 0, 0 / 0 = 1.
inline double welfare_ratio(double numerator, double denominator) {
  if (denominator == 0.0) {
    return numerator == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return numerator / denominator;
}

struct PoaReport {
  double value = 1.0;
  double optimum = 0.0;     // max_a W(a), summed over periods for sequences
  double worst_case = 0.0;  // min over the equilibrium set of E_q[W]
  double shift = 0.0;
};

inline double worst_equilibrium_welfare(const StageGame& game, const std::vector<double>& table,
                                        EquilibriumKind kind) {
  const EquilibriumPolytope poly = build_polytope(game, kind, 0.0);
  double value = 0.0;
  linear_minimize(poly, table, &value);
  return std::max(value, 0.0);
}

inline PoaReport poa(const StageGame& game, const WelfareFunction& w, EquilibriumKind kind) {
  PoaReport r;
  r.shift = payoff_shift(game);
  const auto table = welfare_table(game, w, r.shift);
  r.optimum = *std::max_element(table.begin(), table.end());
  r.worst_case = worst_equilibrium_welfare(game, table, kind);
  r.value = welfare_ratio(r.optimum, r.worst_case);
  return r;
}

// Finite-horizon ratio sum_t max W_t / sum_t min_{E_t} E[W_t].
inline PoaReport dyn_poa(const GameSequence& seq, const WelfareFunction& w, EquilibriumKind kind) {
  PoaReport r;
  r.shift = payoff_shift(seq);
  for (const Segment& s : seq.segments()) {
    const auto table = welfare_table(s.game, w, r.shift);
    r.optimum += s.length * *std::max_element(table.begin(), table.end());
    r.worst_case += s.length * worst_equilibrium_welfare(s.game, table, kind);
  }
  r.value = welfare_ratio(r.optimum, r.worst_case);
  return r;
}

struct BetaReport {
  double value = 1.0;
  bool exact = true;
  double achieved = 0.0;  // best welfare under the switch budget
  double optimum = 0.0;   // OPT-SW
  long long nodes = 0;
};

inline constexpr long long kBetaExactNodes = 1000000;

// Largest fraction of OPT-SW attained by outcome sequences in which every
// player changes action at most C times. Exact DP over (outcome, per-player
// switch counts) up to kBetaExactNodes states; beyond that, the joint-switch
// DP (each joint change costs every player at most one switch) gives a lower
// bound.
inline BetaReport beta(const GameSequence& seq, const WelfareFunction& w, long long switches) {
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  const ActionSpace& space = seq.space();
  const int T = seq.horizon();
  const int n = space.outcome_count();
  const int N = space.num_players();
  const int C = static_cast<int>(std::min<long long>(switches, T - 1));
  const double shift = payoff_shift(seq);
  BetaReport r;

  long long states = 1;
  for (int i = 0; i < N && states <= kBetaExactNodes; ++i) states *= (C + 1);
  r.nodes = states <= kBetaExactNodes ? static_cast<long long>(T) * n * states : kBetaExactNodes + 1;

  std::vector<std::vector<double>> tables;
  for (const Segment& s : seq.segments()) tables.push_back(welfare_table(s.game, w, shift));
  // Summed per period, in the DP's order, so that beta is exactly 1 when the
  // per-period maxima are reachable.
  for (int t = 1; t <= T; ++t) {
    const auto& table = tables[seq.segment_index(t)];
    r.optimum += *std::max_element(table.begin(), table.end());
  }

  if (r.nodes <= kBetaExactNodes) {
    const int S = static_cast<int>(states);
    std::vector<std::vector<int>> decoded(n);
    for (int a = 0; a < n; ++a) decoded[a] = space.decode(a);
    // Switch-count vectors packed base (C + 1).
    std::vector<std::vector<int>> counts(S, std::vector<int>(N));
    for (int s = 0; s < S; ++s) {
      int rest = s;
      for (int i = N - 1; i >= 0; --i) {
        counts[s][i] = rest % (C + 1);
        rest /= (C + 1);
      }
    }
    constexpr double kNone = -std::numeric_limits<double>::infinity();
    std::vector<double> value(static_cast<std::size_t>(n) * S, kNone), next(value.size());
    const auto& first = tables[seq.segment_index(1)];
    for (int a = 0; a < n; ++a) value[static_cast<std::size_t>(a) * S] = first[a];
    for (int t = 2; t <= T; ++t) {
      const auto& table = tables[seq.segment_index(t)];
      std::fill(next.begin(), next.end(), kNone);
      for (int b = 0; b < n; ++b) {
        for (int s = 0; s < S; ++s) {
          const double v = value[static_cast<std::size_t>(b) * S + s];
          if (v == kNone) continue;
          for (int a = 0; a < n; ++a) {
            int packed = 0;
            bool ok = true;
            for (int i = 0; i < N; ++i) {
              const int c = counts[s][i] + (decoded[a][i] != decoded[b][i] ? 1 : 0);
              if (c > C) {
                ok = false;
                break;
              }
              packed = packed * (C + 1) + c;
            }
            if (!ok) continue;
            double& slot = next[static_cast<std::size_t>(a) * S + packed];
            slot = std::max(slot, v + table[a]);
          }
        }
      }
      value.swap(next);
    }
    r.achieved = *std::max_element(value.begin(), value.end());
    r.exact = true;
  } else {
    GainMatrix g(T, n);
    for (int t = 1; t <= T; ++t) {
      const auto& table = tables[seq.segment_index(t)];
      for (int a = 0; a < n; ++a) g(t - 1, a) = table[a];
    }
    r.achieved = external_dynamic_benchmark(g, C).benchmark;
    r.exact = false;
  }
  r.value = welfare_ratio(r.achieved, r.optimum);
  return r;
}

// sum_i u^i(a'^i, a^-i) for the (shifted) payoffs.
inline double deviation_welfare(const StageGame& game, int a, int a_prime, double shift) {
  const ActionSpace& space = game.space();
  double total = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    total += game.deviation_payoff(i, space.action_of(a_prime, i), a) + shift;
  }
  return total;
}

inline bool smoothness_check(const StageGame& game, const WelfareFunction& w, double lambda,
                             double mu) {
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
  if (!(mu > -1.0)) throw ArgumentError("mu must exceed -1");
  const double shift = payoff_shift(game);
  const auto table = welfare_table(game, w, shift);
  const int n = game.space().outcome_count();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (deviation_welfare(game, a, b, shift) < lambda * table[b] - mu * table[a]) return false;
    }
  }
  return true;
}

// Largest lambda for which the game is (lambda, mu)-smooth; infinity when W
// vanishes everywhere.
inline double best_lambda(const StageGame& game, const WelfareFunction& w, double mu) {
  if (!(mu > -1.0)) throw ArgumentError("mu must exceed -1");
  const double shift = payoff_shift(game);
  const auto table = welfare_table(game, w, shift);
  const int n = game.space().outcome_count();
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (!(table[b] > 0.0)) continue;
      best = std::min(best, (deviation_welfare(game, a, b, shift) + mu * table[a]) / table[b]);
    }
  }
  return std::max(best, 0.0);
}

inline double welfare_lower_bound(double lambda, double mu, double beta_value, double opt_sw,
                                  int num_players, double regret) {
  if (!(mu > -1.0)) throw ArgumentError("mu must exceed -1");
  return lambda * beta_value / (1.0 + mu) * opt_sw - num_players / (1.0 + mu) * regret;
}

}  // namespace eqtrack

#endif  // EQTRACK_WELFARE_HPP_
