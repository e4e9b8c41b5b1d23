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

#ifndef EQTRACK_LEARNERS_HPP_
#define EQTRACK_LEARNERS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqtrack/errors.hpp"
#include "eqtrack/game.hpp"

namespace eqtrack {

// Bandit policy for one player. act(t) is called once per period before
// observe(t, ...) with the realized own action and own payoff.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual int num_actions() const = 0;
  virtual std::vector<double> act(long long t) = 0;
  virtual void observe(long long t, int action, double payoff) = 0;
  virtual void reset() = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;
  virtual std::string name() const = 0;
};

using LearnerPtr = std::unique_ptr<Learner>;

// Throws unless p is a probability vector over k actions (sum within 1e-12).
inline void check_mixed_action(std::span<const double> p, int k, const std::string& who) {
  if (static_cast<int>(p.size()) != k) {
    throw InternalError(who + ": mixed action has wrong length");
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InternalError(who + ": mixed action has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InternalError(who + ": mixed action does not sum to one");
  }
}

inline std::vector<double> point_mass_action(int k, int action) {
  std::vector<double> p(k, 0.0);
  p[action] = 1.0;
  return p;
}

// Affine map [-M, M] -> [0, 1], clipped.
struct PayoffRescaler {
  double bound = 1.0;
  double operator()(double g) const {
    return std::clamp((g + bound) / (2.0 * bound), 0.0, 1.0);
  }
};

inline void check_bound(double bound) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw ArgumentError("payoff bound M must be positive");
  }
}

inline void check_action_count(int k) {
  if (k < 2) throw ArgumentError("a learner needs at least two actions");
}

// ---------------------------------------------------------------- Exp3S / Exp3

struct Exp3Tuning {
  double gamma = 1.0;
  double alpha = 0.0;
};

// min{1, sqrt(K ln K / ((e - 1) T))}; sqrt(2 ln 2 / ((e - 1) T)) for K = 2.
inline Exp3Tuning fig1_tuning(long long T, int k) {
  if (T < 1) throw ArgumentError("horizon must be positive");
  const double e = std::numbers::e;
  return {std::min(1.0, std::sqrt(k * std::log(k) / ((e - 1.0) * T))), 0.0};
}

inline Exp3Tuning fig2_tuning(long long T) {
  if (T < 1) throw ArgumentError("horizon must be positive");
  const double gamma = T == 1 ? 1.0 : std::min(1.0, std::sqrt(4.0 * std::log(T) / T));
  return {gamma, 2.0 / T};
}

inline Exp3Tuning lemma_d1_tuning(long long T, int k, long long switches) {
  if (T < 1) throw ArgumentError("horizon must be positive");
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  const double c1 = static_cast<double>(switches + 1);
  const double inner = k * c1 / T * std::log(k * static_cast<double>(T) / c1);
  return {std::min(1.0, std::sqrt(std::max(inner, 0.0))), c1 / T};
}

class Exp3S : public Learner {
 public:
  Exp3S(int k, double gamma, double alpha, double bound)
      : k_(k), gamma_(gamma), alpha_(alpha), rescale_{bound}, w_(k, 1.0) {
    check_action_count(k);
    check_bound(bound);
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must lie in (0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ArgumentError("sharing factor must be non-negative");
    }
  }

  int num_actions() const override { return k_; }
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& weights() const { return w_; }

  std::vector<double> act(long long) override { return mixture(); }

  void observe(long long, int action, double payoff) override {
    const std::vector<double> p = mixture();
    if (!(p[action] > 0.0)) throw InternalError("Exp3S played an action of probability 0");
    update(action, rescale_(payoff), p[action]);
  }

  // Step 4 with an already rescaled reward in [0, 1].
  void update(int action, double reward, double prob) {
    double total = 0.0;
    for (double v : w_) total += v;
    const double share = std::numbers::e * alpha_ / k_ * total;
    for (int j = 0; j < k_; ++j) {
      const double estimate = j == action ? reward / prob : 0.0;
      w_[j] = w_[j] * std::exp(gamma_ * estimate / k_) + share;
    }
    double norm = 0.0;
    for (double v : w_) norm += v;
    for (double& v : w_) v /= norm;
  }

  void reset() override { std::fill(w_.begin(), w_.end(), 1.0); }
  LearnerPtr clone() const override { return std::make_unique<Exp3S>(*this); }
  std::string name() const override { return "exp3s"; }

 protected:
  std::vector<double> mixture() const {
    double total = 0.0;
    for (double v : w_) total += v;
    std::vector<double> p(k_);
    for (int j = 0; j < k_; ++j) p[j] = (1.0 - gamma_) * w_[j] / total + gamma_ / k_;
    return p;
  }

 private:
  int k_;
  double gamma_;
  double alpha_;
  PayoffRescaler rescale_;
  std::vector<double> w_;
};

class Exp3 : public Exp3S {
 public:
  Exp3(int k, double gamma, double bound) : Exp3S(k, gamma, 0.0, bound) {}
  LearnerPtr clone() const override { return std::make_unique<Exp3>(*this); }
  std::string name() const override { return "exp3"; }
};

// ---------------------------------------------------------------- Exp3P

struct Exp3PParameters {
  long long horizon = 1;
  long long switches = 0;
  double s = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
};

inline Exp3PParameters exp3p_parameters(long long T, int k, long long switches) {
  if (T < 1) throw ArgumentError("horizon must be positive");
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  if (switches > T - 1) throw ArgumentError("switch budget S must satisfy S <= T - 1");
  Exp3PParameters out;
  out.horizon = T;
  out.switches = switches;
  const double tk = static_cast<double>(T) * k;
  out.s = (switches == 0 ? 0.0 : switches * std::log(3.0 * tk / switches)) + 2.0 * std::log(k);
  out.beta = 3.0 * std::sqrt(out.s / tk);
  out.gamma = std::min(0.5, std::sqrt(k * out.s / (2.0 * T)));
  out.eta = 0.2 * std::sqrt(out.s / tk);
  return out;
}

class Exp3P : public Learner {
 public:
  Exp3P(int k, const Exp3PParameters& params, double bound)
      : k_(k), params_(params), bound_(bound), cumulative_(k, 0.0) {
    check_action_count(k);
    check_bound(bound);
  }

  int num_actions() const override { return k_; }
  const Exp3PParameters& parameters() const { return params_; }
  const std::vector<double>& cumulative_estimates() const { return cumulative_; }

  std::vector<double> act(long long) override { return mixture(); }

  void observe(long long, int action, double payoff) override {
    const std::vector<double> p = mixture();
    const double g = std::clamp(payoff, -bound_, bound_);
    for (int j = 0; j < k_; ++j) {
      const double hit = j == action ? g : 0.0;
      cumulative_[j] += ((hit + params_.beta) / p[j] + bound_) / (2.0 * bound_);
    }
  }

  void reset() override { std::fill(cumulative_.begin(), cumulative_.end(), 0.0); }
  LearnerPtr clone() const override { return std::make_unique<Exp3P>(*this); }
  std::string name() const override { return "exp3p"; }

 private:
  std::vector<double> mixture() const {
    const double top = *std::max_element(cumulative_.begin(), cumulative_.end());
    std::vector<double> p(k_);
    double total = 0.0;
    for (int j = 0; j < k_; ++j) {
      p[j] = std::exp(params_.eta * (cumulative_[j] - top));
      total += p[j];
    }
    for (int j = 0; j < k_; ++j) {
      p[j] = (1.0 - params_.gamma) * p[j] / total + params_.gamma / k_;
    }
    return p;
  }

  int k_;
  Exp3PParameters params_;
  double bound_;
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------- Rexp3P

using BudgetFunction = std::function<long long(long long)>;

struct Rexp3PPull {
  int r = 1;
  long long first = 1;
  long long last = 1;
  long long budget = 0;  // C^r
  double c = 0.0;        // c^r
  double eta = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
};

inline int rexp3p_pull_index(long long t) {
  if (t < 1) throw ArgumentError("period must be positive");
  int r = 0;
  while (t > 0) {
    t >>= 1;
    ++r;
  }
  return r;
}

inline Rexp3PPull rexp3p_pull_parameters(int r, int k, const BudgetFunction& budget) {
  if (r < 1 || r > 62) throw ArgumentError("pull index out of range");
  Rexp3PPull pull;
  pull.r = r;
  const long long len = 1LL << (r - 1);
  pull.first = len;
  pull.last = 2 * len - 1;
  const long long c_end = budget(2 * len - 1);
  if (c_end < 0) throw ArgumentError("switch budget must be non-negative");
  pull.budget = std::min(c_end + 1, len - 1);
  const double lk = static_cast<double>(len) * k;
  pull.c = (pull.budget == 0 ? 0.0 : pull.budget * std::log(3.0 * lk / pull.budget)) +
           2.0 * std::log(k);
  pull.eta = 0.2 * std::sqrt(pull.c / lk);
  pull.gamma = std::min(0.5, std::sqrt(k * pull.c / (2.0 * len)));
  pull.beta = 3.0 * std::sqrt(pull.c / lk);
  return pull;
}

class Rexp3P : public Learner {
 public:
  Rexp3P(int k, BudgetFunction budget, double bound)
      : k_(k), budget_(std::move(budget)), bound_(bound) {
    check_action_count(k);
    check_bound(bound);
    if (!budget_) throw ArgumentError("Rexp3P needs a switch budget");
  }

  Rexp3P(const Rexp3P& other)
      : k_(other.k_), budget_(other.budget_), bound_(other.bound_), pull_(other.pull_) {
    if (other.inner_) inner_ = std::make_unique<Exp3P>(*other.inner_);
  }

  int num_actions() const override { return k_; }
  const Rexp3PPull& current_pull() const { return pull_; }
  const Exp3P* inner() const { return inner_.get(); }

  std::vector<double> act(long long t) override {
    enter(t);
    if (pull_.r == 1) return std::vector<double>(k_, 1.0 / k_);
    return inner_->act(t - pull_.first + 1);
  }

  void observe(long long t, int action, double payoff) override {
    enter(t);
    if (inner_) inner_->observe(t - pull_.first + 1, action, payoff);
  }

  void reset() override {
    pull_ = Rexp3PPull{};
    pull_.r = 0;
    inner_.reset();
  }

  LearnerPtr clone() const override { return std::make_unique<Rexp3P>(*this); }
  std::string name() const override { return "rexp3p"; }

 private:
  void enter(long long t) {
    const int r = rexp3p_pull_index(t);
    if (r == pull_.r) return;
    pull_ = rexp3p_pull_parameters(r, k_, budget_);
    inner_.reset();
    if (r > 1) {
      Exp3PParameters p;
      p.horizon = pull_.last - pull_.first + 1;
      p.switches = pull_.budget;
      p.s = pull_.c;
      p.beta = pull_.beta;
      p.gamma = pull_.gamma;
      p.eta = pull_.eta;
      inner_ = std::make_unique<Exp3P>(k_, p, bound_);
    }
  }

  int k_;
  BudgetFunction budget_;
  double bound_;
  Rexp3PPull pull_{0, 0, 0, 0, 0.0, 0.0, 0.0, 0.0};
  std::unique_ptr<Exp3P> inner_;
};

// ---------------------------------------------------------------- restarts

// ceil(sqrt(T / (C + 1))).
inline long long default_restart_period(long long T, long long switches) {
  if (T < 1) throw ArgumentError("horizon must be positive");
  if (switches < 0) throw ArgumentError("switch budget must be non-negative");
  const double x = std::sqrt(static_cast<double>(T) / static_cast<double>(switches + 1));
  long long d = static_cast<long long>(std::ceil(x - 1e-12));
  while (d * d * (switches + 1) < T) ++d;
  while (d > 1 && (d - 1) * (d - 1) * (switches + 1) >= T) --d;
  return std::max<long long>(d, 1);
}

// Resets the inner learner entering periods delta + 1, 2 delta + 1, ... and
// feeds it local time within the current block.
class RestartWrapper : public Learner {
 public:
  RestartWrapper(LearnerPtr inner, long long delta) : inner_(std::move(inner)), delta_(delta) {
    if (!inner_) throw ArgumentError("restart wrapper needs an inner learner");
    if (delta < 1) throw ArgumentError("restart period must be at least 1");
  }

  RestartWrapper(const RestartWrapper& other)
      : inner_(other.inner_->clone()),
        delta_(other.delta_),
        block_(other.block_),
        resets_(other.resets_) {}

  int num_actions() const override { return inner_->num_actions(); }
  long long period() const { return delta_; }
  const std::vector<long long>& reset_periods() const { return resets_; }
  const Learner& inner() const { return *inner_; }

  std::vector<double> act(long long t) override {
    enter(t);
    return inner_->act(local(t));
  }

  void observe(long long t, int action, double payoff) override {
    enter(t);
    inner_->observe(local(t), action, payoff);
  }

  void reset() override {
    inner_->reset();
    block_ = 0;
    resets_.clear();
  }

  LearnerPtr clone() const override { return std::make_unique<RestartWrapper>(*this); }
  std::string name() const override { return "restart(" + inner_->name() + ")"; }

 private:
  long long local(long long t) const { return t - block_ * delta_; }

  void enter(long long t) {
    if (t < 1) throw ArgumentError("period must be positive");
    const long long block = (t - 1) / delta_;
    if (block == block_) return;
    inner_->reset();
    block_ = block;
    resets_.push_back(t);
  }

  LearnerPtr inner_;
  long long delta_;
  long long block_ = 0;
  std::vector<long long> resets_;
};

// ---------------------------------------------------------------- regret matching

// Stationary distribution of the switch chain with off-diagonal rates
// max(R[x][y], 0): q = q Q with Q = I + (R+ - diag(row sums)) / mu,
// mu = 2 max row sum. Uniform when no rate is positive.
inline std::vector<double> switch_stationary_distribution(
    const std::vector<std::vector<double>>& regrets, double tol = 1e-10,
    int max_iterations = 100000) {
  const int k = static_cast<int>(regrets.size());
  std::vector<std::vector<double>> rate(k, std::vector<double>(k, 0.0));
  std::vector<double> out_rate(k, 0.0);
  double top = 0.0;
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      if (x != y) rate[x][y] = std::max(regrets[x][y], 0.0);
      out_rate[x] += rate[x][y];
    }
    top = std::max(top, out_rate[x]);
  }
  std::vector<double> q(k, 1.0 / k);
  if (!(top > 0.0)) return q;
  const double mu = 2.0 * top;
  std::vector<double> next(k);
  for (int it = 0; it < max_iterations; ++it) {
    for (int y = 0; y < k; ++y) next[y] = q[y] * (1.0 - out_rate[y] / mu);
    for (int x = 0; x < k; ++x) {
      for (int y = 0; y < k; ++y) next[y] += q[x] * rate[x][y] / mu;
    }
    double total = 0.0, change = 0.0;
    for (int y = 0; y < k; ++y) total += next[y];
    for (int y = 0; y < k; ++y) {
      next[y] /= total;
      change = std::max(change, std::abs(next[y] - q[y]));
    }
    q.swap(next);
    if (change <= tol) break;
  }
  return q;
}

inline double regret_matching_exploration(int k, long long horizon) {
  if (horizon < 1) throw ArgumentError("horizon must be positive");
  return std::min(0.5, std::cbrt(k * std::log(k) / static_cast<double>(horizon)));
}

// Bandit regret matching: importance-weighted internal-regret estimates
// R[x][y] += p(x) u 1(a = y) / p(y) - u 1(a = x), play the switch-chain fixed
// point mixed with gamma-uniform exploration.
class RegretMatching : public Learner {
 public:
  RegretMatching(int k, double gamma, double bound)
      : k_(k), gamma_(gamma), rescale_{bound}, regrets_(k, std::vector<double>(k, 0.0)) {
    check_action_count(k);
    check_bound(bound);
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
      throw ArgumentError("exploration must lie in [0, 1]");
    }
  }

  int num_actions() const override { return k_; }
  double gamma() const { return gamma_; }
  const std::vector<std::vector<double>>& regrets() const { return regrets_; }
  void set_regrets(std::vector<std::vector<double>> r) {
    if (static_cast<int>(r.size()) != k_) throw ArgumentError("regret matrix must be K x K");
    for (const auto& row : r) {
      if (static_cast<int>(row.size()) != k_) throw ArgumentError("regret matrix must be K x K");
    }
    regrets_ = std::move(r);
    cached_.reset();
  }

  std::vector<double> act(long long) override { return mixture(); }

  void observe(long long, int action, double payoff) override {
    const std::vector<double> p = mixture();
    if (!(p[action] > 0.0)) {
      throw InternalError("regret matching played an action of probability 0");
    }
    const double u = rescale_(payoff);
    for (int x = 0; x < k_; ++x) {
      regrets_[x][action] += p[x] * u / p[action];
      regrets_[action][x] -= u;
    }
    cached_.reset();
  }

  void reset() override {
    for (auto& row : regrets_) std::fill(row.begin(), row.end(), 0.0);
    cached_.reset();
  }

  LearnerPtr clone() const override { return std::make_unique<RegretMatching>(*this); }
  std::string name() const override { return "regret_matching"; }

 private:
  std::vector<double> mixture() {
    if (!cached_) {
      std::vector<double> q = switch_stationary_distribution(regrets_);
      for (double& v : q) v = (1.0 - gamma_) * v + gamma_ / k_;
      cached_ = std::move(q);
    }
    return *cached_;
  }

  int k_;
  double gamma_;
  PayoffRescaler rescale_;
  std::vector<std::vector<double>> regrets_;
  std::optional<std::vector<double>> cached_;
};

// ---------------------------------------------------------------- scripted

using ActionSchedule = std::function<int(long long)>;

class ScriptedPolicy : public Learner {
 public:
  ScriptedPolicy(int k, ActionSchedule schedule) : k_(k), schedule_(std::move(schedule)) {
    check_action_count(k);
    if (!schedule_) throw ArgumentError("scripted policy needs a schedule");
  }

  int num_actions() const override { return k_; }

  std::vector<double> act(long long t) override {
    const int a = schedule_(t);
    if (a < 0 || a >= k_) throw InternalError("scripted action out of range");
    return point_mass_action(k_, a);
  }

  void observe(long long, int, double) override {}
  void reset() override {}
  LearnerPtr clone() const override { return std::make_unique<ScriptedPolicy>(*this); }
  std::string name() const override { return "scripted"; }

 private:
  int k_;
  ActionSchedule schedule_;
};

// ---------------------------------------------------------------- trigger

struct TargetMass {
  int outcome = 0;
  int mass = 1;
};

// Cooperates along the cycle that plays each support outcome of the rational
// target m_s times (support in lexicographic order). A payoff more than 1e-9
// away from the scheduled one at period d marks a defection: the fallback is
// reset and plays every later period on local time t - d.
class TriggerPolicy : public Learner {
 public:
  static constexpr double kDetectionTolerance = 1e-9;

  TriggerPolicy(const StageGame& game, int player, std::vector<TargetMass> target,
                LearnerPtr fallback)
      : game_(game), player_(player), fallback_(std::move(fallback)) {
    game_.space().check_player(player);
    if (!fallback_) throw ArgumentError("trigger policy needs a fallback learner");
    if (fallback_->num_actions() != game_.space().num_actions(player)) {
      throw ArgumentError("fallback action count does not match the game");
    }
    if (target.empty()) throw ArgumentError("trigger target is empty");
    std::sort(target.begin(), target.end(),
              [](const TargetMass& a, const TargetMass& b) { return a.outcome < b.outcome; });
    for (std::size_t s = 0; s < target.size(); ++s) {
      game_.space().check_outcome(target[s].outcome);
      if (target[s].mass <= 0) throw ArgumentError("trigger target has a zero-mass outcome");
      if (s > 0 && target[s].outcome == target[s - 1].outcome) {
        throw ArgumentError("trigger target lists an outcome twice");
      }
      for (int j = 0; j < target[s].mass; ++j) cycle_.push_back(target[s].outcome);
    }
    target_ = std::move(target);
  }

  TriggerPolicy(const TriggerPolicy& other)
      : game_(other.game_),
        player_(other.player_),
        fallback_(other.fallback_->clone()),
        target_(other.target_),
        cycle_(other.cycle_),
        detection_(other.detection_) {}

  int num_actions() const override { return game_.space().num_actions(player_); }
  const std::vector<int>& cycle() const { return cycle_; }
  long long cycle_length() const { return static_cast<long long>(cycle_.size()); }
  std::optional<long long> detection_period() const { return detection_; }
  bool detected() const { return detection_.has_value(); }
  const Learner& fallback() const { return *fallback_; }

  int scheduled_outcome(long long t) const {
    return cycle_[static_cast<std::size_t>((t - 1) % cycle_length())];
  }

  std::vector<double> act(long long t) override {
    if (detection_) return fallback_->act(t - *detection_);
    return point_mass_action(num_actions(),
                             game_.space().action_of(scheduled_outcome(t), player_));
  }

  void observe(long long t, int action, double payoff) override {
    if (detection_) {
      fallback_->observe(t - *detection_, action, payoff);
      return;
    }
    const double expected = game_.payoff(player_, scheduled_outcome(t));
    if (std::abs(payoff - expected) > kDetectionTolerance) {
      detection_ = t;
      fallback_->reset();
    }
  }

  void reset() override {
    detection_.reset();
    fallback_->reset();
  }

  LearnerPtr clone() const override { return std::make_unique<TriggerPolicy>(*this); }
  std::string name() const override { return "trigger"; }

 private:
  StageGame game_;
  int player_;
  LearnerPtr fallback_;
  std::vector<TargetMass> target_;
  std::vector<int> cycle_;
  std::optional<long long> detection_;
};

// ---------------------------------------------------------------- counterexample row player

// Row player of the two-game counterexample (actions u = 0, b = 1): u while
// t <= ceil(T/4), then b, as long as its last payoff keeps the expected sign
// (>= 0 up to 2 ceil(T/4) + 1, <= 0 afterwards). Otherwise it hands over for
// good to Exp3S tuned for the remaining T - t + 1 periods.
class AppendixERowPolicy : public Learner {
 public:
  AppendixERowPolicy(long long horizon, double bound) : horizon_(horizon), bound_(bound) {
    if (horizon < 1) throw ArgumentError("horizon must be positive");
    check_bound(bound);
  }

  AppendixERowPolicy(const AppendixERowPolicy& other)
      : horizon_(other.horizon_),
        bound_(other.bound_),
        last_payoff_(other.last_payoff_),
        switch_period_(other.switch_period_) {
    if (other.fallback_) fallback_ = std::make_unique<Exp3S>(*other.fallback_);
  }

  static Exp3Tuning fallback_tuning(long long remaining) {
    const double e = std::numbers::e;
    const double r = static_cast<double>(remaining);
    return {std::min(1.0, std::sqrt((4.0 * std::log(2.0 * r) + 2.0 * e) / ((e - 1.0) * r))),
            1.0 / r};
  }

  int num_actions() const override { return 2; }
  std::optional<long long> switch_period() const { return switch_period_; }

  std::vector<double> act(long long t) override {
    if (!switch_period_) {
      const long long q = (horizon_ + 3) / 4;
      int scripted = -1;
      if (t <= q && last_payoff_ >= 0.0) {
        scripted = 0;
      } else if (t > q && t <= 2 * q + 1 && last_payoff_ >= 0.0) {
        scripted = 1;
      } else if (t > 2 * q + 1 && last_payoff_ <= 0.0) {
        scripted = 1;
      }
      if (scripted >= 0) return point_mass_action(2, scripted);
      const long long remaining = std::max<long long>(horizon_ - t + 1, 1);
      const Exp3Tuning tune = fallback_tuning(remaining);
      fallback_ = std::make_unique<Exp3S>(2, tune.gamma, tune.alpha, bound_);
      switch_period_ = t;
    }
    return fallback_->act(t - *switch_period_ + 1);
  }

  void observe(long long t, int action, double payoff) override {
    last_payoff_ = payoff;
    if (switch_period_) fallback_->observe(t - *switch_period_ + 1, action, payoff);
  }

  void reset() override {
    last_payoff_ = 0.0;
    switch_period_.reset();
    fallback_.reset();
  }

  LearnerPtr clone() const override { return std::make_unique<AppendixERowPolicy>(*this); }
  std::string name() const override { return "appendixE_row"; }

 private:
  long long horizon_;
  double bound_;
  double last_payoff_ = 0.0;
  std::optional<long long> switch_period_;
  std::unique_ptr<Exp3S> fallback_;
};

}  // namespace eqtrack

#endif  // EQTRACK_LEARNERS_HPP_
