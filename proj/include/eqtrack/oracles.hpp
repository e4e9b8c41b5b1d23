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

#ifndef EQTRACK_ORACLES_HPP_
#define EQTRACK_ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eqtrack/errors.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/trace.hpp"

namespace eqtrack {

// gains[t][x]: what the player would have earned at period t + 1 with action
// x against the opponents' realized actions.
class GainMatrix {
 public:
  GainMatrix() = default;
  GainMatrix(int horizon, int k) : horizon_(horizon), k_(k), g_(static_cast<std::size_t>(horizon) * k) {
    if (horizon < 1 || k < 1) throw ArgumentError("gain matrix must be non-empty");
  }

  explicit GainMatrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw ArgumentError("gain matrix must be non-empty");
    horizon_ = static_cast<int>(rows.size());
    k_ = static_cast<int>(rows.front().size());
    g_.reserve(static_cast<std::size_t>(horizon_) * k_);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != k_) throw ArgumentError("ragged gain matrix");
      for (double v : row) {
        if (!std::isfinite(v)) throw ArgumentError("gain matrix has a non-finite entry");
        g_.push_back(v);
      }
    }
  }

  int horizon() const { return horizon_; }
  int num_actions() const { return k_; }
  double operator()(int t, int x) const { return g_[static_cast<std::size_t>(t) * k_ + x]; }
  double& operator()(int t, int x) { return g_[static_cast<std::size_t>(t) * k_ + x]; }

 private:
  int horizon_ = 0;
  int k_ = 0;
  std::vector<double> g_;
};

inline GainMatrix gain_matrix(const RunTrace& trace, const GameSequence& seq, int player) {
  if (trace.horizon() != seq.horizon()) {
    throw ArgumentError("trace horizon " + std::to_string(trace.horizon()) +
                        " does not match the sequence horizon " + std::to_string(seq.horizon()));
  }
  seq.space().check_player(player);
  const int k = seq.space().num_actions(player);
  GainMatrix g(seq.horizon(), k);
  for (int t = 1; t <= seq.horizon(); ++t) {
    const StageGame& game = seq.stage(t);
    for (int x = 0; x < k; ++x) g(t - 1, x) = game.deviation_payoff(player, x, trace.outcome(t));
  }
  return g;
}

inline std::vector<int> own_actions(const RunTrace& trace, const ActionSpace& space, int player) {
  std::vector<int> a(trace.horizon());
  for (int t = 1; t <= trace.horizon(); ++t) a[t - 1] = space.action_of(trace.outcome(t), player);
  return a;
}

enum class RegretKind { kExternal, kInternal };

inline std::string to_string(RegretKind kind) {
  return kind == RegretKind::kExternal ? "external" : "internal";
}

// One block of an internal-regret comparator: on [first, last] every play of
// `from` is replaced by `to`.
struct SwapBlock {
  Interval interval;
  int from = 0;
  int to = 0;
  double gain = 0.0;
};

struct RegretReport {
  RegretKind kind = RegretKind::kExternal;
  double benchmark = 0.0;
  double realized = 0.0;
  double regret = 0.0;
  long long budget = 0;           // C after clamping
  int switches = 0;               // switches used by the comparator
  std::vector<int> comparator;    // external: action per period
  std::vector<int> switch_periods;  // external: periods t where x_t != x_{t-1}
  std::vector<SwapBlock> swaps;   // internal
  bool exact = true;
  std::string method;
};

namespace detail {

inline void finish_external(RegretReport& r) {
  r.switch_periods.clear();
  for (std::size_t t = 1; t < r.comparator.size(); ++t) {
    if (r.comparator[t] != r.comparator[t - 1]) r.switch_periods.push_back(static_cast<int>(t) + 1);
  }
  r.switches = static_cast<int>(r.switch_periods.size());
}

}  // namespace detail

// Best action sequence with at most C switches. Ties resolve to the lowest
// final action and, walking backwards, to staying, so switches happen as early
// as possible; a switch goes to the lowest action attaining the maximum.
inline RegretReport external_dynamic_benchmark(const GainMatrix& g, long long switches) {
  const int T = g.horizon();
  const int k = g.num_actions();
  if (T < 1 || k < 1) throw ArgumentError("gain matrix must be non-empty");
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  RegretReport report;
  report.kind = RegretKind::kExternal;
  const int C = static_cast<int>(std::min<long long>(switches, T - 1));
  report.budget = C;
  report.method = "dp";
  report.comparator.assign(T, 0);

  if (C >= T - 1 && T > 1) {
    for (int t = 0; t < T; ++t) {
      int best = 0;
      for (int x = 1; x < k; ++x) {
        if (g(t, x) > g(t, best)) best = x;
      }
      report.comparator[t] = best;
      report.benchmark += g(t, best);
    }
    report.method = "per-period";
    detail::finish_external(report);
    return report;
  }

  const int S = C + 1;
  // value[x * S + s] = best total up to t ending at x with at most s switches.
  std::vector<double> value(static_cast<std::size_t>(k) * S), next(value.size());
  // from[(t * k + x) * S + s]: -1 stay, otherwise the previous action.
  std::vector<std::int16_t> from(static_cast<std::size_t>(T) * k * S, -1);
  std::vector<double> layer_max(S);
  std::vector<int> layer_arg(S);
  for (int x = 0; x < k; ++x) {
    for (int s = 0; s < S; ++s) value[x * S + s] = g(0, x);
  }
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      layer_arg[s] = 0;
      layer_max[s] = value[s];
      for (int y = 1; y < k; ++y) {
        if (value[y * S + s] > layer_max[s]) {
          layer_max[s] = value[y * S + s];
          layer_arg[s] = y;
        }
      }
    }
    for (int x = 0; x < k; ++x) {
      for (int s = 0; s < S; ++s) {
        double best = value[x * S + s];
        std::int16_t src = -1;
        if (s > 0 && layer_max[s - 1] > best) {
          best = layer_max[s - 1];
          src = static_cast<std::int16_t>(layer_arg[s - 1]);
        }
        next[x * S + s] = best + g(t, x);
        from[(static_cast<std::size_t>(t) * k + x) * S + s] = src;
      }
    }
    value.swap(next);
  }
  int x = 0;
  for (int y = 1; y < k; ++y) {
    if (value[y * S + C] > value[x * S + C]) x = y;
  }
  report.benchmark = value[x * S + C];
  int s = C;
  for (int t = T - 1; t >= 0; --t) {
    report.comparator[t] = x;
    if (t == 0) break;
    const std::int16_t src = from[(static_cast<std::size_t>(t) * k + x) * S + s];
    if (src >= 0) {
      x = src;
      --s;
    }
  }
  detail::finish_external(report);
  return report;
}

namespace detail {

// Prefix sums P[x][y][t] = sum_{tau < t} 1(a_tau = x)(g[tau][y] - g[tau][x]).
class SwapPrefix {
 public:
  SwapPrefix(std::span<const int> actions, const GainMatrix& g)
      : T_(g.horizon()), k_(g.num_actions()),
        p_(static_cast<std::size_t>(k_) * k_ * (T_ + 1), 0.0) {
    for (int t = 0; t < T_; ++t) {
      const int a = actions[t];
      for (int x = 0; x < k_; ++x) {
        for (int y = 0; y < k_; ++y) {
          const double inc = x == a ? g(t, y) - g(t, x) : 0.0;
          at(x, y, t + 1) = at(x, y, t) + inc;
        }
      }
    }
  }

  // Best swap on periods [i + 1, j] (0-based half-open (i, j]).
  SwapBlock best(int i, int j) const {
    SwapBlock block;
    block.interval = {i + 1, j};
    for (int x = 0; x < k_; ++x) {
      for (int y = 0; y < k_; ++y) {
        if (x == y) continue;
        const double v = at(x, y, j) - at(x, y, i);
        if (v > block.gain) {
          block.gain = v;
          block.from = x;
          block.to = y;
        }
      }
    }
    return block;
  }

 private:
  double& at(int x, int y, int t) { return p_[(static_cast<std::size_t>(x) * k_ + y) * (T_ + 1) + t]; }
  double at(int x, int y, int t) const {
    return p_[(static_cast<std::size_t>(x) * k_ + y) * (T_ + 1) + t];
  }

  int T_;
  int k_;
  std::vector<double> p_;
};

inline void check_actions(std::span<const int> actions, const GainMatrix& g) {
  if (g.horizon() < 1) throw ArgumentError("gain matrix must be non-empty");
  if (static_cast<int>(actions.size()) != g.horizon()) {
    throw ArgumentError("action trace and gain matrix lengths differ");
  }
  for (int a : actions) {
    if (a < 0 || a >= g.num_actions()) throw ArgumentError("played action out of range");
  }
}

// Interval DP restricted to cut points `cuts` (0 = start, last = T, strictly
// increasing). F[c][j] = best over <= c intervals covering cuts[0..j].
inline RegretReport interval_dp(std::span<const int> actions, const GainMatrix& g,
                                long long switches, const std::vector<int>& cuts) {
  const SwapPrefix prefix(actions, g);
  const int n = static_cast<int>(cuts.size()) - 1;
  const int C = static_cast<int>(std::min<long long>(switches, n - 1));
  const int L = C + 1;
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> f(L + 1, std::vector<double>(n + 1, kNone));
  std::vector<std::vector<int>> arg(L + 1, std::vector<int>(n + 1, -1));
  f[0][0] = 0.0;
  for (int c = 1; c <= L; ++c) {
    f[c][0] = 0.0;
    for (int j = 1; j <= n; ++j) {
      // Use at most c intervals: either fewer, or a last interval (i, j].
      f[c][j] = f[c - 1][j];
      arg[c][j] = -1;
      for (int i = 0; i < j; ++i) {
        if (f[c - 1][i] == kNone) continue;
        const double v = f[c - 1][i] + prefix.best(cuts[i], cuts[j]).gain;
        if (v > f[c][j]) {
          f[c][j] = v;
          arg[c][j] = i;
        }
      }
    }
  }
  RegretReport report;
  report.kind = RegretKind::kInternal;
  report.budget = C;
  report.regret = f[L][n];
  std::vector<SwapBlock> blocks;
  for (int c = L, j = n; j > 0;) {
    while (arg[c][j] < 0) --c;
    const int i = arg[c][j];
    blocks.push_back(prefix.best(cuts[i], cuts[j]));
    j = i;
    --c;
  }
  std::reverse(blocks.begin(), blocks.end());
  report.swaps = std::move(blocks);
  report.switches = static_cast<int>(report.swaps.size()) - 1;
  double realized = 0.0;
  for (int t = 0; t < g.horizon(); ++t) realized += g(t, actions[t]);
  report.realized = realized;
  report.benchmark = realized + report.regret;
  return report;
}

}  // namespace detail

// Exact dynamic internal benchmark over partitions of [1, T] into at most C + 1
// intervals. O(T^2 (C + 1) K^2).
inline RegretReport internal_dynamic_benchmark(std::span<const int> actions, const GainMatrix& g,
                                               long long switches) {
  detail::check_actions(actions, g);
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  std::vector<int> cuts(g.horizon() + 1);
  for (int t = 0; t <= g.horizon(); ++t) cuts[t] = t;
  RegretReport report = detail::interval_dp(actions, g, switches, cuts);
  report.method = "interval-dp";
  return report;
}

// Same optimization with cuts restricted to the given batch boundaries. Exact
// whenever an optimal partition is batch-aligned; otherwise a lower bound.
inline RegretReport internal_dynamic_benchmark_aligned(std::span<const int> actions,
                                                       const GainMatrix& g, long long switches,
                                                       const std::vector<Interval>& batches) {
  detail::check_actions(actions, g);
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  std::vector<int> cuts{0};
  for (const Interval& b : batches) {
    if (b.first != cuts.back() + 1) throw ArgumentError("batches must tile [1, T] in order");
    cuts.push_back(b.last);
  }
  if (cuts.back() != g.horizon()) throw ArgumentError("batches must tile [1, T] in order");
  RegretReport report = detail::interval_dp(actions, g, switches, cuts);
  report.method = "batch-aligned";
  report.exact = false;
  return report;
}

inline double realized_value(const GainMatrix& g, std::span<const int> actions) {
  double v = 0.0;
  for (int t = 0; t < g.horizon(); ++t) v += g(t, actions[t]);
  return v;
}

// Horizons above this use the batch-aligned internal oracle.
inline constexpr int kInternalExactHorizon = 10000;

inline RegretReport realized_regret(const RunTrace& trace, const GameSequence& seq, int player,
                                    long long switches, RegretKind kind) {
  const GainMatrix g = gain_matrix(trace, seq, player);
  const std::vector<int> actions = own_actions(trace, seq.space(), player);
  if (kind == RegretKind::kInternal) {
    if (g.horizon() <= kInternalExactHorizon) {
      return internal_dynamic_benchmark(actions, g, switches);
    }
    return internal_dynamic_benchmark_aligned(actions, g, switches, segment_batches(seq));
  }
  RegretReport report = external_dynamic_benchmark(g, switches);
  report.realized = realized_value(g, actions);
  report.regret = report.benchmark - report.realized;
  return report;
}

// Sum over batches of the clipped static regret [max_x sum (g(x) - g(a_t))]_+.
inline double clipped_batch_regret(const RunTrace& trace, const GameSequence& seq, int player) {
  const GainMatrix g = gain_matrix(trace, seq, player);
  const std::vector<int> actions = own_actions(trace, seq.space(), player);
  double total = 0.0;
  for (const Interval& b : segment_batches(seq)) {
    double realized = 0.0;
    std::vector<double> fixed(g.num_actions(), 0.0);
    for (int t = b.first - 1; t < b.last; ++t) {
      realized += g(t, actions[t]);
      for (int x = 0; x < g.num_actions(); ++x) fixed[x] += g(t, x);
    }
    total += std::max(0.0, *std::max_element(fixed.begin(), fixed.end()) - realized);
  }
  return total;
}

}  // namespace eqtrack

#endif  // EQTRACK_ORACLES_HPP_
