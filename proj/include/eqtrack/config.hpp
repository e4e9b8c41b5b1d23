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

#ifndef EQTRACK_CONFIG_HPP_
#define EQTRACK_CONFIG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "eqtrack/errors.hpp"
#include "eqtrack/factory.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/io.hpp"
#include "eqtrack/sim.hpp"

namespace eqtrack {

// Two-batch scenario for correlated-equilibrium tracking: matching pennies,
// then chicken.
inline GameSequence pennies_then_chicken(int horizon) {
  if (horizon < 2) throw ArgumentError("horizon must be at least 2");
  return GameSequence({Segment{fixtures::matching_pennies(), horizon / 2, {}},
                       Segment{fixtures::chicken(), horizon - horizon / 2, {}}});
}

// Named stage games for `analyze builtin:<name>`.
inline StageGame builtin_game(const std::string& name) {
  if (name == "appendix_b") return fixtures::appendix_b_game(0.1);
  if (name == "appendix_e_gamma1") return fixtures::appendix_e_gamma1(0.1);
  if (name == "appendix_e_gamma2") return fixtures::appendix_e_gamma2(0.1);
  if (name == "example1_early") return fixtures::example1_game(fixtures::kExample1BetaEarly);
  if (name == "example1_late") return fixtures::example1_game(fixtures::kExample1BetaLate);
  if (name == "matching_pennies") return fixtures::matching_pennies();
  if (name == "chicken") return fixtures::chicken();
  if (name == "coordination") return fixtures::coordination();
  throw ArgumentError("unknown builtin game '" + name +
                      "' (appendix_b, appendix_e_gamma1, appendix_e_gamma2, example1_early, "
                      "example1_late, matching_pennies, chicken, coordination)");
}

inline std::vector<std::string> builtin_game_names() {
  return {"appendix_b",     "appendix_e_gamma1", "appendix_e_gamma2", "example1_early",
          "example1_late",  "matching_pennies",  "chicken",           "coordination"};
}

// "sequence": {"builtin": name, ...} or an inline game document.
inline SequenceFactory sequence_factory(const json& j, const std::string& path) {
  io::expect_object(j, path);
  if (!j.contains("builtin")) {
    const SequenceSpec spec = sequence_spec_from_json(j, path);
    return [spec](int T) { return spec.materialize(T); };
  }
  const std::string name = io::as_string(j["builtin"], io::child(path, "builtin"));
  if (name == "example1") {
    io::check_keys(j, {"builtin", "customers"}, path);
    const double customers = io::optional_value<double>(j, "customers", path, 1.0, io::as_number);
    if (!(customers > 0.0)) throw ConfigError(io::child(path, "customers"), "customers must be positive");
    return [customers](int T) { return fixtures::example1_sequence(T, customers); };
  }
  if (name == "appendixE") {
    io::check_keys(j, {"builtin", "eps"}, path);
    const double eps = io::optional_value<double>(j, "eps", path, 0.1, io::as_number);
    if (!(std::abs(eps) <= 1.0)) throw ConfigError(io::child(path, "eps"), "eps must lie in [-1, 1]");
    return [eps](int T) { return fixtures::appendix_e_sequence(T, eps); };
  }
  if (name == "pennies_then_chicken") {
    io::check_keys(j, {"builtin"}, path);
    return [](int T) { return pennies_then_chicken(T); };
  }
  io::check_keys(j, {"builtin"}, path);
  StageGame game;
  try {
    game = builtin_game(name);
  } catch (const ArgumentError& e) {
    throw ConfigError(io::child(path, "builtin"), e.what());
  }
  return [game](int T) { return GameSequence::constant(game, T); };
}

// Parsed experiment document; `document` is the normalized JSON that the
// manifest stores and that re-runs the experiment.
struct ExperimentConfig {
  json document;
  SimConfig sim;
  std::string name;
};

inline MetricsSpec metrics_from_json(const json& j, const std::string& path) {
  MetricsSpec m;
  if (j.is_null()) return m;
  io::check_keys(j, {"equilibrium", "p", "epsilon", "external_budget", "internal_budget", "clipped",
                     "welfare", "per_replication_distances"},
                 path);
  try {
    m.equilibrium = parse_equilibrium_kind(
        io::optional_value<std::string>(j, "equilibrium", path, "hannan", io::as_string));
  } catch (const ArgumentError& e) {
    throw ConfigError(io::child(path, "equilibrium"), e.what());
  }
  try {
    m.p = parse_p_norm(io::optional_value<std::string>(j, "p", path, "2", [](const json& v, const std::string& p) {
      if (v.is_number()) return std::to_string(io::as_integer(v, p));
      return io::as_string(v, p);
    }));
  } catch (const ArgumentError& e) {
    throw ConfigError(io::child(path, "p"), e.what());
  }
  m.epsilon = io::optional_value<double>(j, "epsilon", path, 0.0, io::as_number);
  if (m.epsilon < 0.0) throw ConfigError(io::child(path, "epsilon"), "epsilon must be non-negative");
  if (j.contains("external_budget")) {
    m.external_budget = budget_from_json(j["external_budget"], io::child(path, "external_budget"));
  }
  if (j.contains("internal_budget") && !j["internal_budget"].is_null()) {
    m.internal_budget = budget_from_json(j["internal_budget"], io::child(path, "internal_budget"));
  }
  m.clipped = io::optional_value<bool>(j, "clipped", path, false, io::as_bool);
  m.per_replication_distances =
      io::optional_value<bool>(j, "per_replication_distances", path, true, io::as_bool);
  if (j.contains("welfare")) {
    const std::string wp = io::child(path, "welfare");
    const json& w = j["welfare"];
    if (w.is_string()) {
      try {
        m.welfare = parse_welfare(w.get<std::string>());
      } catch (const ArgumentError& e) {
        throw ConfigError(wp, e.what());
      }
    } else {
      io::check_keys(w, {"table"}, wp);
      const json& t = io::require(w, "table", wp);
      io::expect_array(t, io::child(wp, "table"));
      std::vector<double> values;
      for (std::size_t a = 0; a < t.size(); ++a) values.push_back(io::as_number(t[a], io::child(io::child(wp, "table"), a)));
      try {
        m.welfare = WelfareFunction::from_table(std::move(values));
      } catch (const ArgumentError& e) {
        throw ConfigError(wp, e.what());
      }
    }
  }
  return m;
}

inline ExperimentConfig experiment_from_json(const json& doc) {
  io::check_keys(doc, {"name", "sequence", "learners", "T", "grid", "replications", "seed", "jobs",
                       "metrics"},
                 "");
  ExperimentConfig cfg;
  cfg.document = doc;
  cfg.name = io::optional_value<std::string>(doc, "name", "", "custom", io::as_string);
  cfg.sim.sequence = sequence_factory(io::require(doc, "sequence", ""), "/sequence");

  const json& learners = io::require(doc, "learners", "");
  io::expect_array(learners, "/learners");
  for (std::size_t i = 0; i < learners.size(); ++i) io::expect_object(learners[i], io::child("/learners", i));

  if (doc.contains("grid")) {
    io::expect_array(doc["grid"], "/grid");
    if (doc["grid"].empty()) throw ConfigError("/grid", "grid is empty");
    cfg.sim.grid.clear();
    for (std::size_t g = 0; g < doc["grid"].size(); ++g) {
      const long long T = io::as_integer(doc["grid"][g], io::child("/grid", g));
      if (T < 1 || T > 100000000) throw ConfigError(io::child("/grid", g), "horizon out of range");
      cfg.sim.grid.push_back(static_cast<int>(T));
    }
    if (!std::is_sorted(cfg.sim.grid.begin(), cfg.sim.grid.end())) {
      throw ConfigError("/grid", "grid must be sorted ascending");
    }
  } else {
    const long long T = io::optional_value<long long>(doc, "T", "", 10000, io::as_integer);
    if (T < 1 || T > 100000000) throw ConfigError("/T", "horizon out of range");
    cfg.sim.grid = {static_cast<int>(T)};
  }
  const long long reps = io::optional_value<long long>(doc, "replications", "", 50, io::as_integer);
  if (reps < 1) throw ConfigError("/replications", "need at least one replication");
  cfg.sim.replications = static_cast<int>(reps);
  const long long seed = io::optional_value<long long>(doc, "seed", "", 1, io::as_integer);
  if (seed < 0) throw ConfigError("/seed", "seed must be non-negative");
  cfg.sim.seed = static_cast<std::uint64_t>(seed);
  cfg.sim.jobs = static_cast<int>(io::optional_value<long long>(doc, "jobs", "", 1, io::as_integer));
  cfg.sim.metrics = metrics_from_json(doc.contains("metrics") ? doc["metrics"] : json(), "/metrics");

  // Validate learner specs and the sequence against the smallest horizon now,
  // so schema errors surface before any simulation starts.
  const int probe_T = cfg.sim.grid.front();
  GameSequence probe;
  try {
    probe = cfg.sim.sequence(probe_T);
  } catch (const ArgumentError& e) {
    throw ConfigError("/sequence", e.what());
  }
  if (static_cast<int>(learners.size()) != probe.num_players()) {
    throw ConfigError("/learners", "need one learner per player (" + std::to_string(probe.num_players()) + ")");
  }
  for (std::size_t i = 0; i < learners.size(); ++i) {
    make_learner(learners[i], {&probe, static_cast<int>(i), probe_T}, io::child("/learners", i));
  }
  const json specs = learners;
  cfg.sim.profile = [specs](const GameSequence& seq, int T) {
    std::vector<LearnerPtr> out;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      out.push_back(make_learner(specs[i], {&seq, static_cast<int>(i), T}, io::child("/learners", i)));
    }
    return out;
  };
  return cfg;
}

// ---------------------------------------------------------------- presets

inline std::vector<std::string> preset_names() {
  return {"example1-exp3", "example1-exp3s",      "appendixB3",         "appendixE",
          "trigger-demo",  "rexp3p-demo",         "smooth-welfare-demo"};
}

inline json preset_document(const std::string& name) {
  json doc{{"name", name}, {"T", 10000}, {"replications", 50}, {"seed", 1}};
  const json hannan{{"equilibrium", "hannan"}, {"p", "2"}, {"external_budget", 1}};
  if (name == "example1-exp3") {
    doc["sequence"] = {{"builtin", "example1"}};
    doc["learners"] = json::array({{{"kind", "exp3"}, {"params", {{"tuning", "fig1"}}}},
                                   {{"kind", "exp3"}, {"params", {{"tuning", "fig1"}}}}});
    doc["metrics"] = hannan;
  } else if (name == "example1-exp3s") {
    doc["sequence"] = {{"builtin", "example1"}};
    doc["learners"] = json::array({{{"kind", "exp3s"}, {"params", {{"tuning", "fig2"}}}},
                                   {{"kind", "exp3s"}, {"params", {{"tuning", "fig2"}}}}});
    doc["metrics"] = hannan;
  } else if (name == "appendixB3") {
    doc["sequence"] = {{"builtin", "example1"}};
    doc["learners"] = json::array({{{"kind", "exp3"}, {"params", {{"tuning", "fig1"}}}},
                                   {{"kind", "scripted"}, {"params", {{"schedule", "batch_best_reply"}}}}});
    doc["metrics"] = hannan;
    doc["metrics"]["clipped"] = true;
    doc.erase("T");
    doc["grid"] = {1000, 10000, 100000};
  } else if (name == "appendixE") {
    doc["sequence"] = {{"builtin", "appendixE"}, {"eps", 0.1}};
    doc["learners"] = json::array({{{"kind", "appendixE_row"}},
                                   {{"kind", "scripted"}, {"params", {{"schedule", "appendixE_column"}}}}});
    doc["metrics"] = hannan;
    doc["metrics"]["clipped"] = true;
  } else if (name == "trigger-demo") {
    // Rational CCE of chicken with denominator 4.
    const json target = json::array({{{"outcome", {0, 0}}, {"mass", 2}},
                                     {{"outcome", {0, 1}}, {"mass", 1}},
                                     {{"outcome", {1, 0}}, {"mass", 1}}});
    doc["sequence"] = {{"builtin", "chicken"}};
    doc["learners"] = json::array({{{"kind", "trigger"}, {"params", {{"target", target}}}},
                                   {{"kind", "trigger"}, {"params", {{"target", target}}}}});
    doc["metrics"] = hannan;
  } else if (name == "rexp3p-demo") {
    doc["sequence"] = {{"builtin", "matching_pennies"}};
    doc["learners"] = json::array(
        {{{"kind", "rexp3p"}, {"params", {{"budget", {{"kind", "power"}, {"exponent", 0.3}}}}}},
         {{"kind", "scripted"},
          {"params", {{"schedule", "periodic"}, {"actions", {0, 1}},
                      {"block", {{"kind", "power"}, {"exponent", 0.75}}}}}}});
    doc["metrics"] = hannan;
    doc["metrics"]["external_budget"] = {{"kind", "power"}, {"exponent", 0.3}};
  } else if (name == "smooth-welfare-demo") {
    doc["sequence"] = {{"builtin", "example1"}};
    const json learner{{"kind", "exp3s"}, {"params", {{"tuning", "lemmaD1"}, {"budget", 1}}}};
    doc["learners"] = json::array({learner, learner});
    doc["metrics"] = hannan;
    doc["metrics"]["welfare"] = "additive";
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw ArgumentError("unknown preset '" + name + "' (" + names + ")");
  }
  return doc;
}

// ---------------------------------------------------------------- manifest

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline json summary_to_json(const ReplicationSummary& s) {
  json batches = json::array();
  for (const BatchSummary& b : s.batches) {
    batches.push_back({{"first", b.interval.first},
                       {"last", b.interval.last},
                       {"mean_distribution", b.mean_distribution.probabilities()},
                       {"distance", to_json(b.distance)},
                       {"mean_of_distances", b.mean_of_distances}});
  }
  auto est = [](const std::vector<Estimate>& xs) {
    json out = json::array();
    for (const Estimate& e : xs) out.push_back({{"mean", e.mean}, {"se", e.se}});
    return out;
  };
  json j{{"T", s.horizon},
         {"replications", s.replications},
         {"batches", batches},
         {"tracking_error", s.tracking_error},
         {"tracking_error_se", s.tracking_per_replication.se},
         {"tracking_error_mean_of_distances", s.tracking_per_replication.mean},
         {"external_budget", s.external_budget},
         {"external_regret", est(s.external_regret)},
         {"welfare", {{"mean", s.welfare.mean}, {"se", s.welfare.se}, {"payoff_shift", s.welfare_shift}}}};
  if (s.internal_budget) {
    j["internal_budget"] = *s.internal_budget;
    j["internal_regret"] = est(s.internal_regret);
    j["internal_exact"] = s.internal_exact;
  }
  if (!s.clipped_regret.empty()) j["clipped_regret"] = est(s.clipped_regret);
  return j;
}

inline json make_manifest(const ExperimentConfig& cfg) {
  const std::string canonical = cfg.document.dump();
  return {{"tool", "eqtrack"},
          {"config_hash", hex64(fnv1a64(canonical))},
          {"seed", cfg.sim.seed},
          {"replications", cfg.sim.replications},
          {"grid", cfg.sim.grid},
          {"config", cfg.document}};
}

}  // namespace eqtrack

#endif  // EQTRACK_CONFIG_HPP_
