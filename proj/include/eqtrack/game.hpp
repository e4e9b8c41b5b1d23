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

#ifndef EQTRACK_GAME_HPP_
#define EQTRACK_GAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqtrack/errors.hpp"

namespace eqtrack {

// Action counts per player. Outcomes are ranked lexicographically with player
// 0 as the most significant digit, so for two 2-action players the order is
// (0,0), (0,1), (1,0), (1,1).
class ActionSpace {
 public:
  ActionSpace() = default;

  explicit ActionSpace(std::vector<int> actions_per_player)
      : actions_(std::move(actions_per_player)) {
    if (actions_.empty()) throw ArgumentError("action space needs a player");
    outcome_count_ = 1;
    for (int k : actions_) {
      if (k < 2) throw ArgumentError("every player needs at least two actions");
      outcome_count_ *= k;
    }
  }

  int num_players() const { return static_cast<int>(actions_.size()); }
  int num_actions(int player) const { return actions_.at(player); }
  const std::vector<int>& actions_per_player() const { return actions_; }
  int outcome_count() const { return outcome_count_; }

  int index(std::span<const int> actions) const {
    if (static_cast<int>(actions.size()) != num_players()) {
      throw ArgumentError("action profile has the wrong number of players");
    }
    int rank = 0;
    for (int i = 0; i < num_players(); ++i) {
      if (actions[i] < 0 || actions[i] >= actions_[i]) {
        throw ArgumentError("action index out of range");
      }
      rank = rank * actions_[i] + actions[i];
    }
    return rank;
  }

  std::vector<int> decode(int outcome) const {
    check_outcome(outcome);
    std::vector<int> actions(actions_.size());
    for (int i = num_players() - 1; i >= 0; --i) {
      actions[i] = outcome % actions_[i];
      outcome /= actions_[i];
    }
    return actions;
  }

  int action_of(int outcome, int player) const {
    check_outcome(outcome);
    int stride = 1;
    for (int j = num_players() - 1; j > player; --j) stride *= actions_[j];
    return (outcome / stride) % actions_.at(player);
  }

  // Outcome obtained from `outcome` when `player` switches to `action`.
  int with_action(int outcome, int player, int action) const {
    check_outcome(outcome);
    int stride = 1;
    for (int j = num_players() - 1; j > player; --j) stride *= actions_[j];
    const int current = (outcome / stride) % actions_.at(player);
    return outcome + (action - current) * stride;
  }

  int opponent_count(int player) const {
    return outcome_count_ / actions_.at(player);
  }

  // Lexicographic rank of the opponents' profile a^{-i} inside `outcome`.
  int opponent_rank(int outcome, int player) const {
    check_outcome(outcome);
    int rank = 0;
    int remaining = outcome;
    std::vector<int> digits(actions_.size());
    for (int i = num_players() - 1; i >= 0; --i) {
      digits[i] = remaining % actions_[i];
      remaining /= actions_[i];
    }
    for (int i = 0; i < num_players(); ++i) {
      if (i == player) continue;
      rank = rank * actions_[i] + digits[i];
    }
    return rank;
  }

  void check_outcome(int outcome) const {
    if (outcome < 0 || outcome >= outcome_count_) {
      throw ArgumentError("outcome index out of range");
    }
  }

  void check_player(int player) const {
    if (player < 0 || player >= num_players()) {
      throw ArgumentError("player index out of range");
    }
  }

  friend bool operator==(const ActionSpace&, const ActionSpace&) = default;

 private:
  std::vector<int> actions_;
  int outcome_count_ = 0;
};

// One-shot game: payoffs[player][outcome], every entry in [-M, M].
class StageGame {
 public:
  StageGame() = default;

  StageGame(ActionSpace space, std::vector<std::vector<double>> payoffs,
            double bound)
      : space_(std::move(space)), payoffs_(std::move(payoffs)), bound_(bound) {
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) {
      throw ArgumentError("payoff bound M must be positive and finite");
    }
    if (static_cast<int>(payoffs_.size()) != space_.num_players()) {
      throw ArgumentError("payoff table needs one row per player");
    }
    for (const auto& row : payoffs_) {
      if (static_cast<int>(row.size()) != space_.outcome_count()) {
        throw ArgumentError("payoff row needs one entry per outcome");
      }
      for (double v : row) {
        if (!std::isfinite(v)) throw ArgumentError("payoff is not finite");
        if (std::abs(v) > bound_) {
          throw ArgumentError("payoff magnitude exceeds the bound M");
        }
      }
    }
  }

  const ActionSpace& space() const { return space_; }
  int num_players() const { return space_.num_players(); }
  double bound() const { return bound_; }
  const std::vector<std::vector<double>>& payoffs() const { return payoffs_; }

  double payoff(int player, int outcome) const {
    space_.check_player(player);
    space_.check_outcome(outcome);
    return payoffs_[player][outcome];
  }

  // u^i(x, a^{-i}) for the opponents' profile inside `outcome`.
  double deviation_payoff(int player, int action, int outcome) const {
    return payoffs_[player][space_.with_action(outcome, player, action)];
  }

  // Bitwise equality of the payoff tensors (the ||u_t - u_{t+1}||_inf > 0
  // change test). The bound is bookkeeping and does not take part.
  friend bool operator==(const StageGame& a, const StageGame& b) {
    return a.space_ == b.space_ && a.payoffs_ == b.payoffs_;
  }

 private:
  ActionSpace space_;
  std::vector<std::vector<double>> payoffs_;
  double bound_ = 1.0;
};

// Additive i.i.d. payoff noise, clipped to [-M, M] when realized.
struct NoiseSpec {
  enum class Kind { kUniform, kGaussian };
  Kind kind = Kind::kGaussian;
  double scale = 0.0;  // half-width for uniform, standard deviation for gaussian

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

inline std::string to_string(NoiseSpec::Kind kind) {
  return kind == NoiseSpec::Kind::kUniform ? "uniform" : "gaussian";
}

struct Segment {
  StageGame game;
  int length = 0;
  std::optional<NoiseSpec> noise;
};

// Closed 1-based period interval [first, last].
struct Interval {
  int first = 1;
  int last = 0;
  int length() const { return last - first + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Horizon-indexed stage games, stored run-length encoded. Adjacent segments
// always differ (in payoffs or noise law), so segments are exactly the batches.
class GameSequence {
 public:
  GameSequence() = default;

  explicit GameSequence(std::vector<Segment> segments) {
    if (segments.empty()) throw ArgumentError("sequence needs a segment");
    const ActionSpace space = segments.front().game.space();
    for (auto& seg : segments) {
      if (seg.length < 0) throw ArgumentError("negative segment length");
      if (seg.length == 0) continue;
      if (!(seg.game.space() == space)) {
        throw ArgumentError("all stage games must share one action space");
      }
      if (seg.noise && !(seg.noise->scale >= 0.0)) {
        throw ArgumentError("noise scale must be non-negative");
      }
      if (!segments_.empty() && segments_.back().game == seg.game &&
          segments_.back().noise == seg.noise) {
        segments_.back().length += seg.length;
      } else {
        segments_.push_back(std::move(seg));
      }
    }
    if (segments_.empty()) throw ArgumentError("horizon must be positive");
    ends_.reserve(segments_.size());
    int end = 0;
    for (const auto& seg : segments_) {
      end += seg.length;
      ends_.push_back(end);
    }
  }

  // Repeated game.
  static GameSequence constant(StageGame game, int horizon) {
    return GameSequence({Segment{std::move(game), horizon, std::nullopt}});
  }

  int horizon() const { return ends_.empty() ? 0 : ends_.back(); }
  const ActionSpace& space() const { return segments_.front().game.space(); }
  int num_players() const { return space().num_players(); }
  const std::vector<Segment>& segments() const { return segments_; }

  double bound() const {
    double m = 0.0;
    for (const auto& seg : segments_) m = std::max(m, seg.game.bound());
    return m;
  }

  int segment_index(int t) const {
    check_period(t);
    return static_cast<int>(std::lower_bound(ends_.begin(), ends_.end(), t) -
                            ends_.begin());
  }

  const StageGame& stage(int t) const { return segments_[segment_index(t)].game; }
  const std::optional<NoiseSpec>& noise(int t) const {
    return segments_[segment_index(t)].noise;
  }

  bool has_noise() const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [](const Segment& s) { return s.noise.has_value(); });
  }

  void check_period(int t) const {
    if (t < 1 || t > horizon()) throw ArgumentError("period out of range");
  }

 private:
  std::vector<Segment> segments_;
  std::vector<int> ends_;
};

// u^i_t(a). With noise configured this is the mean payoff; realized draws
// happen only in the simulation engine.
inline double payoff(const GameSequence& seq, int t, int player, int outcome) {
  return seq.stage(t).payoff(player, outcome);
}

// Number of periods t < T with Gamma_t != Gamma_{t+1}. With noise, a change
// of noise law counts as a change even if the means agree.
inline int variation(const GameSequence& seq) {
  return static_cast<int>(seq.segments().size()) - 1;
}

// Maximal runs T_(1), ..., T_(V+1) on which the stage game is constant.
inline std::vector<Interval> segment_batches(const GameSequence& seq) {
  std::vector<Interval> batches;
  int first = 1;
  for (const auto& seg : seq.segments()) {
    batches.push_back({first, first + seg.length - 1});
    first += seg.length;
  }
  return batches;
}

// Per player, the lowest-index action that is a best reply to every opponent
// profile simultaneously (nullopt if none exists).
inline std::vector<std::optional<int>> single_best_reply(const StageGame& game) {
  const ActionSpace& space = game.space();
  std::vector<std::optional<int>> result(space.num_players());
  for (int i = 0; i < space.num_players(); ++i) {
    for (int x = 0; x < space.num_actions(i) && !result[i]; ++x) {
      bool dominant = true;
      for (int a = 0; a < space.outcome_count() && dominant; ++a) {
        if (space.action_of(a, i) != 0) continue;  // one outcome per a^{-i}
        const double ux = game.deviation_payoff(i, x, a);
        for (int y = 0; y < space.num_actions(i); ++y) {
          if (game.deviation_payoff(i, y, a) > ux) {
            dominant = false;
            break;
          }
        }
      }
      if (dominant) result[i] = x;
    }
  }
  return result;
}

inline bool is_single_best_reply(const StageGame& game) {
  const auto replies = single_best_reply(game);
  return std::all_of(replies.begin(), replies.end(),
                     [](const auto& r) { return r.has_value(); });
}

// True when `action` beats every other action of `player` strictly against
// every opponent profile.
inline bool is_strictly_dominant(const StageGame& game, int player, int action) {
  const ActionSpace& space = game.space();
  for (int a = 0; a < space.outcome_count(); ++a) {
    if (space.action_of(a, player) != action) continue;
    for (int y = 0; y < space.num_actions(player); ++y) {
      if (y == action) continue;
      if (!(game.deviation_payoff(player, action, a) >
            game.deviation_payoff(player, y, a))) {
        return false;
      }
    }
  }
  return true;
}

// Positive-affine reparameterization u~(x, h) = scale * (u(x, h) + offset[h])
// that makes every x-section of one player's payoff injective in h.
struct InjectiveTransform {
  double scale = 1.0;
  std::vector<double> offsets;  // indexed by lexicographic opponent rank
};

// beta_0 = -2M and beta_s = beta_0 + 3Ms; the opponent profile of rank r
// (0-based) receives beta_{r+1}, so shifted payoffs of rank r lie in
// [3Mr, 3Mr + 2M]. The scale is (3|A^{-i}| - 1)M.
inline InjectiveTransform injective_transform(const StageGame& game, int player) {
  game.space().check_player(player);
  const double m = game.bound();
  const int n = game.space().opponent_count(player);
  InjectiveTransform tr;
  tr.scale = (3.0 * n - 1.0) * m;
  tr.offsets.resize(n);
  for (int r = 0; r < n; ++r) tr.offsets[r] = -2.0 * m + 3.0 * m * (r + 1);
  return tr;
}

inline StageGame make_injective(const StageGame& game, int player) {
  const InjectiveTransform tr = injective_transform(game, player);
  const ActionSpace& space = game.space();
  auto payoffs = game.payoffs();
  for (int a = 0; a < space.outcome_count(); ++a) {
    payoffs[player][a] = tr.scale * (game.payoff(player, a) +
                                     tr.offsets[space.opponent_rank(a, player)]);
  }
  const double new_bound =
      std::max(game.bound(), tr.scale * (3.0 * space.opponent_count(player) - 1.0) *
                                 game.bound());
  return StageGame(space, std::move(payoffs), new_bound);
}

// Two-seller logit pricing game. Seller i at prices (p^i, p^-i) earns
// p^i * N * e^{alpha - beta p^i} / (1 + e^{alpha - beta p^i} + e^{alpha - beta p^-i});
// production cost is zero and demand is its expectation.
inline StageGame logit_pricing_game(double alpha, double beta, double customers,
                                    const std::vector<double>& prices) {
  if (!(customers > 0.0)) throw ArgumentError("customers must be positive");
  if (prices.empty()) throw ArgumentError("price list is empty");
  if (!(beta > 0.0)) throw ArgumentError("price sensitivity must be positive");
  const int k = static_cast<int>(prices.size());
  ActionSpace space({k, k});
  std::vector<std::vector<double>> payoffs(2, std::vector<double>(k * k));
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      const double ex = std::exp(alpha - beta * prices[x]);
      const double ey = std::exp(alpha - beta * prices[y]);
      const int a = x * k + y;
      payoffs[0][a] = prices[x] * customers * ex / (1.0 + ex + ey);
      payoffs[1][a] = prices[y] * customers * ey / (1.0 + ex + ey);
    }
  }
  const double max_price = *std::max_element(prices.begin(), prices.end());
  return StageGame(std::move(space), std::move(payoffs), customers * max_price);
}

namespace fixtures {

inline constexpr double kExample1Alpha = 4.0;
inline constexpr double kExample1BetaEarly = 0.75;
inline constexpr double kExample1BetaLate = 1.75;
inline constexpr int kPriceLow = 0;   // p_l = 1
inline constexpr int kPriceHigh = 1;  // p_h = 2

inline StageGame example1_game(double beta, double customers = 1.0) {
  return logit_pricing_game(kExample1Alpha, beta, customers, {1.0, 2.0});
}

// Selling season of even length: beta = 3/4 in the first half, 7/4 after.
inline GameSequence example1_sequence(int horizon, double customers = 1.0) {
  if (horizon < 2 || horizon % 2 != 0) {
    throw ArgumentError("the pricing season needs an even horizon >= 2");
  }
  return GameSequence(
      {Segment{example1_game(kExample1BetaEarly, customers), horizon / 2, {}},
       Segment{example1_game(kExample1BetaLate, customers), horizon / 2, {}}});
}

// Rows a, b against columns c, d; (a, c) is the unique Hannan equilibrium.
inline StageGame appendix_b_game(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must be in (0,1)");
  return StageGame(ActionSpace({2, 2}),
                   {{delta, 1.0, 0.0, 0.0}, {delta, 0.0, 1.0, 0.0}}, 1.0);
}

// Rows u, b; columns c, d; the column player earns eps everywhere.
inline StageGame appendix_e_gamma1(double eps) {
  return StageGame(ActionSpace({2, 2}), {{1.0, -1.0, -1.0, 1.0}, {eps, eps, eps, eps}},
                   1.0);
}

inline StageGame appendix_e_gamma2(double eps) {
  return StageGame(ActionSpace({2, 2}),
                   {{0.25, 0.25, -0.25, -0.25}, {eps, eps, eps, eps}}, 1.0);
}

inline int ceil_quarter(int horizon) { return (horizon + 3) / 4; }

// Gamma_1 for the first 2*ceil(T/4) periods, Gamma_2 afterwards.
inline GameSequence appendix_e_sequence(int horizon, double eps) {
  if (horizon < 8) throw ArgumentError("the counterexample needs T >= 8");
  const int first = 2 * ceil_quarter(horizon);
  return GameSequence({Segment{appendix_e_gamma1(eps), first, {}},
                       Segment{appendix_e_gamma2(eps), horizon - first, {}}});
}

inline StageGame matching_pennies() {
  return StageGame(ActionSpace({2, 2}), {{1, -1, -1, 1}, {-1, 1, 1, -1}}, 1.0);
}

// Chicken scaled to [0, 1]: actions (chicken, dare).
inline StageGame chicken() {
  return StageGame(ActionSpace({2, 2}),
                   {{6.0 / 7, 2.0 / 7, 1.0, 0.0}, {6.0 / 7, 1.0, 2.0 / 7, 0.0}}, 1.0);
}

// Pure coordination: each player earns 1 when the actions match.
inline StageGame coordination() {
  return StageGame(ActionSpace({2, 2}), {{1, 0, 0, 1}, {1, 0, 0, 1}}, 1.0);
}

}  // namespace fixtures

}  // namespace eqtrack

#endif  // EQTRACK_GAME_HPP_
