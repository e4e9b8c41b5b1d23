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

#ifndef EQTRACK_FACTORY_HPP_
#define EQTRACK_FACTORY_HPP_

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "eqtrack/errors.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/io.hpp"
#include "eqtrack/learners.hpp"

namespace eqtrack {

// Switch budget C as a function of the horizon: a constant, or
// ceil(scale * T^exponent).
struct BudgetSpec {
  enum class Kind { kConstant, kPower };
  Kind kind = Kind::kConstant;
  long long value = 0;
  double exponent = 0.0;
  double scale = 1.0;

  static BudgetSpec constant(long long c) { return {Kind::kConstant, c, 0.0, 1.0}; }
  static BudgetSpec power(double exponent, double scale = 1.0) {
    return {Kind::kPower, 0, exponent, scale};
  }

  // The 1e-9 guard keeps exact powers (1024^0.3 = 8) from rounding up.
  long long operator()(long long T) const {
    if (kind == Kind::kConstant) return value;
    return static_cast<long long>(
        std::ceil(scale * std::pow(static_cast<double>(T), exponent) - 1e-9));
  }

  BudgetFunction function() const {
    const BudgetSpec self = *this;
    return [self](long long T) { return self(T); };
  }
};

inline BudgetSpec budget_from_json(const json& j, const std::string& path) {
  if (j.is_number()) {
    const long long c = io::as_integer(j, path);
    if (c < 0) throw ConfigError(path, "switch budget must be non-negative");
    return BudgetSpec::constant(c);
  }
  io::expect_object(j, path);
  const std::string kind = io::as_string(io::require(j, "kind", path), io::child(path, "kind"));
  if (kind == "constant") {
    io::check_keys(j, {"kind", "value"}, path);
    const long long c = io::as_integer(io::require(j, "value", path), io::child(path, "value"));
    if (c < 0) throw ConfigError(io::child(path, "value"), "switch budget must be non-negative");
    return BudgetSpec::constant(c);
  }
  if (kind == "power") {
    io::check_keys(j, {"kind", "exponent", "scale"}, path);
    const double e = io::as_number(io::require(j, "exponent", path), io::child(path, "exponent"));
    const double s = io::optional_value<double>(j, "scale", path, 1.0, io::as_number);
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError(io::child(path, "exponent"), "exponent must lie in [0, 1)");
    if (!(s > 0.0)) throw ConfigError(io::child(path, "scale"), "scale must be positive");
    return BudgetSpec::power(e, s);
  }
  throw ConfigError(io::child(path, "kind"), "budget kind must be 'constant' or 'power'");
}

inline json to_json(const BudgetSpec& b) {
  if (b.kind == BudgetSpec::Kind::kConstant) return {{"kind", "constant"}, {"value", b.value}};
  return {{"kind", "power"}, {"exponent", b.exponent}, {"scale", b.scale}};
}

struct LearnerContext {
  const GameSequence* seq = nullptr;
  int player = 0;
  long long horizon = 1;  // tuning horizon (the restart block inside a wrapper)
};

LearnerPtr make_learner(const json& spec, const LearnerContext& ctx, const std::string& path);

namespace detail {

inline const json& params_of(const json& spec, const std::string& path) {
  static const json kEmpty = json::object();
  if (!spec.contains("params") || spec["params"].is_null()) return kEmpty;
  io::expect_object(spec["params"], io::child(path, "params"));
  return spec["params"];
}

inline BudgetSpec budget_param(const json& params, const std::string& path, BudgetSpec fallback) {
  if (!params.contains("budget")) return fallback;
  return budget_from_json(params["budget"], io::child(path, "budget"));
}

inline ActionSchedule scripted_schedule(const json& params, const LearnerContext& ctx,
                                        const std::string& path) {
  const int k = ctx.seq->space().num_actions(ctx.player);
  const long long T = ctx.horizon;
  auto action_at = [&](const json& j, const std::string& p) {
    const long long a = io::as_integer(j, p);
    if (a < 0 || a >= k) throw ConfigError(p, "action out of range for this player");
    return static_cast<int>(a);
  };
  const std::string kind = io::as_string(io::require(params, "schedule", path), io::child(path, "schedule"));
  std::vector<int> plan;  // explicit per-period plan (empty means use `base`)
  ActionSchedule base;
  if (kind == "constant") {
    const int a = action_at(io::require(params, "action", path), io::child(path, "action"));
    base = [a](long long) { return a; };
  } else if (kind == "actions") {
    const std::string ap = io::child(path, "actions");
    const json& list = io::require(params, "actions", path);
    io::expect_array(list, ap);
    if (list.empty()) throw ConfigError(ap, "need at least one action");
    std::vector<int> actions;
    for (std::size_t i = 0; i < list.size(); ++i) actions.push_back(action_at(list[i], io::child(ap, i)));
    base = [actions](long long t) { return actions[static_cast<std::size_t>((t - 1) % actions.size())]; };
  } else if (kind == "runs") {
    const std::string rp = io::child(path, "runs");
    const json& runs = io::require(params, "runs", path);
    io::expect_array(runs, rp);
    if (runs.empty()) throw ConfigError(rp, "need at least one run");
    double cumulative = 0.0;
    long long end = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const std::string p = io::child(rp, r);
      io::check_keys(runs[r], {"action", "length", "share"}, p);
      const int a = action_at(io::require(runs[r], "action", p), io::child(p, "action"));
      long long next_end;
      if (runs[r].contains("length")) {
        next_end = end + io::as_integer(runs[r]["length"], io::child(p, "length"));
      } else if (runs[r].contains("share")) {
        cumulative += io::as_number(runs[r]["share"], io::child(p, "share"));
        next_end = std::llround(cumulative * T);
      } else {
        throw ConfigError(p, "run needs 'length' or 'share'");
      }
      for (long long t = end; t < std::min(next_end, T); ++t) plan.push_back(a);
      end = std::max(end, next_end);
      if (r + 1 == runs.size()) {
        while (static_cast<long long>(plan.size()) < T) plan.push_back(a);
      }
    }
  } else if (kind == "periodic") {
    const std::string ap = io::child(path, "actions");
    const json& list = io::require(params, "actions", path);
    io::expect_array(list, ap);
    if (list.empty()) throw ConfigError(ap, "need at least one action");
    std::vector<int> actions;
    for (std::size_t i = 0; i < list.size(); ++i) actions.push_back(action_at(list[i], io::child(ap, i)));
    const long long block = std::max<long long>(
        1, budget_from_json(io::require(params, "block", path), io::child(path, "block"))(T));
    base = [actions, block](long long t) {
      return actions[static_cast<std::size_t>(((t - 1) / block) % static_cast<long long>(actions.size()))];
    };
  } else if (kind == "batch_best_reply") {
    for (const Segment& seg : ctx.seq->segments()) {
      const auto best = single_best_reply(seg.game)[ctx.player];
      if (!best) {
        throw ConfigError(io::child(path, "schedule"),
                          "a stage game has no single best reply for player " +
                              std::to_string(ctx.player));
      }
      for (int t = 0; t < seg.length; ++t) plan.push_back(*best);
    }
  } else if (kind == "appendixE_column") {
    const long long q = (T + 3) / 4;
    base = [q](long long t) { return t <= q ? 0 : 1; };
  } else {
    throw ConfigError(io::child(path, "schedule"),
                      "unknown schedule '" + kind +
                          "' (constant, actions, runs, periodic, batch_best_reply, appendixE_column)");
  }
  if (!plan.empty()) {
    base = [plan](long long t) {
      const std::size_t i = static_cast<std::size_t>(std::max<long long>(t - 1, 0));
      return plan[std::min(i, plan.size() - 1)];
    };
  }
  if (params.contains("deviations")) {
    const std::string dp = io::child(path, "deviations");
    io::expect_array(params["deviations"], dp);
    std::map<long long, int> overrides;
    for (std::size_t d = 0; d < params["deviations"].size(); ++d) {
      const std::string p = io::child(dp, d);
      const json& dev = params["deviations"][d];
      io::check_keys(dev, {"period", "action"}, p);
      const long long t = io::as_integer(io::require(dev, "period", p), io::child(p, "period"));
      if (t < 1) throw ConfigError(io::child(p, "period"), "period must be positive");
      overrides[t] = action_at(io::require(dev, "action", p), io::child(p, "action"));
    }
    base = [base, overrides](long long t) {
      auto it = overrides.find(t);
      return it == overrides.end() ? base(t) : it->second;
    };
  }
  return base;
}

inline std::vector<TargetMass> trigger_target(const json& params, const ActionSpace& space,
                                              const std::string& path) {
  const std::string tp = io::child(path, "target");
  const json& target = io::require(params, "target", path);
  io::expect_array(target, tp);
  std::vector<TargetMass> out;
  for (std::size_t s = 0; s < target.size(); ++s) {
    const std::string p = io::child(tp, s);
    io::check_keys(target[s], {"outcome", "mass"}, p);
    const json& o = io::require(target[s], "outcome", p);
    int index;
    if (o.is_array()) {
      if (static_cast<int>(o.size()) != space.num_players()) {
        throw ConfigError(io::child(p, "outcome"), "one action per player expected");
      }
      std::vector<int> acts;
      for (std::size_t i = 0; i < o.size(); ++i) {
        const long long a = io::as_integer(o[i], io::child(io::child(p, "outcome"), i));
        if (a < 0 || a >= space.num_actions(static_cast<int>(i))) {
          throw ConfigError(io::child(io::child(p, "outcome"), i), "action out of range");
        }
        acts.push_back(static_cast<int>(a));
      }
      index = space.index(acts);
    } else {
      const long long a = io::as_integer(o, io::child(p, "outcome"));
      if (a < 0 || a >= space.outcome_count()) throw ConfigError(io::child(p, "outcome"), "outcome out of range");
      index = static_cast<int>(a);
    }
    const long long m = io::as_integer(io::require(target[s], "mass", p), io::child(p, "mass"));
    if (m <= 0) throw ConfigError(io::child(p, "mass"), "trigger target masses must be positive integers");
    out.push_back({index, static_cast<int>(m)});
  }
  return out;
}

inline json default_trigger_fallback() {
  return {{"kind", "restart"}, {"params", {{"inner", {{"kind", "exp3"}}}, {"budget", 1}}}};
}

}  // namespace detail

inline LearnerPtr make_learner(const json& spec, const LearnerContext& ctx, const std::string& path) {
  if (!ctx.seq) throw ArgumentError("learner context needs a game sequence");
  io::check_keys(spec, {"kind", "params"}, path);
  const std::string kind = io::as_string(io::require(spec, "kind", path), io::child(path, "kind"));
  const json& params = detail::params_of(spec, path);
  const std::string pp = io::child(path, "params");
  const int k = ctx.seq->space().num_actions(ctx.player);
  const double bound = ctx.seq->bound();
  const long long T = ctx.horizon;
  auto tuning_name = [&](const char* fallback) {
    return io::optional_value<std::string>(params, "tuning", pp, fallback, io::as_string);
  };
  try {
    if (kind == "exp3") {
      io::check_keys(params, {"tuning", "gamma", "budget"}, pp);
      const std::string tuning = tuning_name("fig1");
      Exp3Tuning t;
      if (tuning == "fig1") {
        t = fig1_tuning(T, k);
      } else if (tuning == "lemmaD1") {
        t = lemma_d1_tuning(T, k, detail::budget_param(params, pp, BudgetSpec::constant(1))(T));
      } else {
        throw ConfigError(io::child(pp, "tuning"), "exp3 tunings: fig1, lemmaD1");
      }
      t.gamma = io::optional_value<double>(params, "gamma", pp, t.gamma, io::as_number);
      return std::make_unique<Exp3>(k, t.gamma, bound);
    }
    if (kind == "exp3s") {
      io::check_keys(params, {"tuning", "gamma", "alpha", "budget"}, pp);
      const std::string tuning = tuning_name("fig2");
      Exp3Tuning t;
      if (tuning == "fig2") {
        t = fig2_tuning(T);
      } else if (tuning == "lemmaD1") {
        t = lemma_d1_tuning(T, k, detail::budget_param(params, pp, BudgetSpec::constant(1))(T));
      } else {
        throw ConfigError(io::child(pp, "tuning"), "exp3s tunings: fig2, lemmaD1");
      }
      t.gamma = io::optional_value<double>(params, "gamma", pp, t.gamma, io::as_number);
      t.alpha = io::optional_value<double>(params, "alpha", pp, t.alpha, io::as_number);
      return std::make_unique<Exp3S>(k, t.gamma, t.alpha, bound);
    }
    if (kind == "exp3p") {
      io::check_keys(params, {"S", "budget"}, pp);
      long long s = detail::budget_param(params, pp, BudgetSpec::constant(0))(T);
      if (params.contains("S")) s = io::as_integer(params["S"], io::child(pp, "S"));
      return std::make_unique<Exp3P>(k, exp3p_parameters(T, k, s), bound);
    }
    if (kind == "rexp3p") {
      io::check_keys(params, {"budget"}, pp);
      return std::make_unique<Rexp3P>(
          k, detail::budget_param(params, pp, BudgetSpec::power(0.3)).function(), bound);
    }
    if (kind == "restart") {
      io::check_keys(params, {"inner", "period", "budget"}, pp);
      long long delta = default_restart_period(
          T, detail::budget_param(params, pp, BudgetSpec::constant(1))(T));
      if (params.contains("period")) delta = io::as_integer(params["period"], io::child(pp, "period"));
      if (delta < 1) throw ConfigError(io::child(pp, "period"), "restart period must be positive");
      LearnerContext inner = ctx;
      inner.horizon = std::min(delta, T);
      return std::make_unique<RestartWrapper>(
          make_learner(io::require(params, "inner", pp), inner, io::child(pp, "inner")), delta);
    }
    if (kind == "regret_matching") {
      io::check_keys(params, {"gamma"}, pp);
      const double gamma = io::optional_value<double>(params, "gamma", pp,
                                                      regret_matching_exploration(k, T), io::as_number);
      return std::make_unique<RegretMatching>(k, gamma, bound);
    }
    if (kind == "trigger") {
      io::check_keys(params, {"target", "segment", "fallback"}, pp);
      const long long seg = io::optional_value<long long>(params, "segment", pp, 0, io::as_integer);
      if (seg < 0 || seg >= static_cast<long long>(ctx.seq->segments().size())) {
        throw ConfigError(io::child(pp, "segment"), "segment index out of range");
      }
      const StageGame& game = ctx.seq->segments()[seg].game;
      const json fallback = params.contains("fallback") ? params["fallback"] : detail::default_trigger_fallback();
      return std::make_unique<TriggerPolicy>(
          game, ctx.player, detail::trigger_target(params, game.space(), pp),
          make_learner(fallback, ctx, io::child(pp, "fallback")));
    }
    if (kind == "scripted") {
      io::check_keys(params, {"schedule", "action", "actions", "runs", "block", "deviations"}, pp);
      return std::make_unique<ScriptedPolicy>(k, detail::scripted_schedule(params, ctx, pp));
    }
    if (kind == "appendixE_row") {
      io::check_keys(params, {}, pp);
      if (k != 2) throw ConfigError(path, "appendixE_row needs exactly two actions");
      return std::make_unique<AppendixERowPolicy>(T, bound);
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(io::child(path, "kind"),
                    "unknown learner kind '" + kind +
                        "' (exp3, exp3s, exp3p, rexp3p, restart, regret_matching, trigger, "
                        "scripted, appendixE_row)");
}

}  // namespace eqtrack

#endif  // EQTRACK_FACTORY_HPP_
