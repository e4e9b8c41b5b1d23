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

#ifndef EQTRACK_SIM_HPP_
#define EQTRACK_SIM_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "eqtrack/equilibrium.hpp"
#include "eqtrack/errors.hpp"
#include "eqtrack/factory.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/learners.hpp"
#include "eqtrack/oracles.hpp"
#include "eqtrack/rng.hpp"
#include "eqtrack/trace.hpp"
#include "eqtrack/welfare.hpp"

namespace eqtrack {

namespace detail {

inline double realized_noise(const NoiseSpec& noise, const CounterRng& rng, std::uint64_t stream,
                             std::uint64_t t) {
  if (noise.scale == 0.0) return 0.0;
  if (noise.kind == NoiseSpec::Kind::kUniform) {
    return noise.scale * (2.0 * rng.uniform(stream, t, 0) - 1.0);
  }
  const double u1 = 1.0 - rng.uniform(stream, t, 0);
  const double u2 = rng.uniform(stream, t, 1);
  return noise.scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace detail

// Plays one episode. Player i samples its action from stream i of the
// replication's counter RNG; payoff noise for player i uses stream N + i.
inline RunTrace play_episode(const GameSequence& seq, std::vector<LearnerPtr>& learners,
                             std::uint64_t seed, std::uint64_t replication = 0,
                             bool record_mixed = false) {
  const ActionSpace& space = seq.space();
  const int n = space.num_players();
  if (static_cast<int>(learners.size()) != n) {
    throw ArgumentError("need one learner per player");
  }
  for (int i = 0; i < n; ++i) {
    if (!learners[i]) throw ArgumentError("missing learner");
    if (learners[i]->num_actions() != space.num_actions(i)) {
      throw ArgumentError("learner " + std::to_string(i) + " has the wrong number of actions");
    }
    learners[i]->reset();
  }
  const CounterRng rng(seed, replication);
  const int T = seq.horizon();
  RunTrace trace;
  trace.num_players = n;
  trace.seed = seed;
  trace.replication = replication;
  trace.outcomes.resize(T);
  trace.payoffs.resize(static_cast<std::size_t>(T) * n);
  if (record_mixed) trace.mixed.resize(T);
  std::vector<int> actions(n);
  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> p = learners[i]->act(t);
      check_mixed_action(p, space.num_actions(i), learners[i]->name());
      actions[i] = sample_index(p, rng.uniform(static_cast<std::uint64_t>(i), t));
      if (record_mixed) trace.mixed[t - 1].insert(trace.mixed[t - 1].end(), p.begin(), p.end());
    }
    const int outcome = space.index(actions);
    trace.outcomes[t - 1] = outcome;
    const int seg = seq.segment_index(t);
    const StageGame& game = seq.segments()[seg].game;
    const auto& noise = seq.segments()[seg].noise;
    for (int i = 0; i < n; ++i) {
      double u = game.payoff(i, outcome);
      if (noise) {
        u += detail::realized_noise(*noise, rng, static_cast<std::uint64_t>(n + i), t);
        u = std::clamp(u, -game.bound(), game.bound());
      }
      trace.payoffs[static_cast<std::size_t>(t - 1) * n + i] = u;
      learners[i]->observe(t, actions[i], u);
    }
  }
  return trace;
}

// Outcome counts per batch: counts[k][a].
inline std::vector<std::vector<long long>> batch_counts(const RunTrace& trace,
                                                        const GameSequence& seq) {
  const auto batches = segment_batches(seq);
  std::vector<std::vector<long long>> counts(
      batches.size(), std::vector<long long>(seq.space().outcome_count(), 0));
  for (std::size_t k = 0; k < batches.size(); ++k) {
    for (int t = batches[k].first; t <= batches[k].last; ++t) ++counts[k][trace.outcome(t)];
  }
  return counts;
}

using SequenceFactory = std::function<GameSequence(int horizon)>;
using ProfileFactory = std::function<std::vector<LearnerPtr>(const GameSequence&, int horizon)>;

struct MetricsSpec {
  EquilibriumKind equilibrium = EquilibriumKind::kHannan;
  PNorm p = PNorm::kTwo;
  double epsilon = 0.0;
  BudgetSpec external_budget = BudgetSpec::constant(1);
  std::optional<BudgetSpec> internal_budget;
  bool clipped = false;
  WelfareFunction welfare = WelfareFunction::additive();
  bool per_replication_distances = true;
};

struct SimConfig {
  SequenceFactory sequence;
  ProfileFactory profile;
  int replications = 50;
  std::uint64_t seed = 1;
  std::vector<int> grid{10000};
  int jobs = 1;
  MetricsSpec metrics;
};

struct BatchSummary {
  Interval interval;
  JointDistribution mean_distribution;
  DistanceReport distance;       // distance of the replication-averaged distribution
  double mean_of_distances = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

inline Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  if (xs.empty()) return e;
  for (double x : xs) e.mean += x;
  e.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return e;
}

struct ReplicationSummary {
  int horizon = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  long long external_budget = 0;
  std::optional<long long> internal_budget;
  std::vector<BatchSummary> batches;
  double tracking_error = 0.0;          // distance of the mean, summed with batch lengths
  Estimate tracking_per_replication;    // mean and SE of per-replication tracking errors
  std::vector<double> replication_tracking;
  std::vector<Estimate> external_regret;  // per player
  std::vector<Estimate> internal_regret;  // per player, when requested
  bool internal_exact = true;
  std::vector<Estimate> clipped_regret;   // per player, when requested
  Estimate welfare;                       // realized sum_t W_t(a_t)
  double welfare_shift = 0.0;
  std::vector<std::vector<long long>> counts;  // per batch, summed over replications
};

namespace detail {

struct ReplicationResult {
  std::vector<std::vector<long long>> counts;
  double tracking = 0.0;
  std::vector<double> batch_distance;
  std::vector<double> external;
  std::vector<double> internal;
  bool internal_exact = true;
  std::vector<double> clipped;
  double welfare = 0.0;
};

// Runs fn(r) for r in [0, count) on up to `jobs` threads; the first exception
// is rethrown after all workers stop.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int r = next++; r < count; r = next++) {
        try {
          fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Independent seeded replications at one horizon. Replication r uses
// CounterRng(seed, r), so the same (seed, r) pairs are shared across the
// horizons of a sweep. Results are reduced in replication order.
inline ReplicationSummary monte_carlo(const SimConfig& config, int horizon) {
  if (config.replications < 1) throw ArgumentError("replications must be at least 1");
  if (!config.sequence || !config.profile) throw ArgumentError("config needs a sequence and a profile");
  const GameSequence seq = config.sequence(horizon);
  if (seq.horizon() != horizon) throw ArgumentError("sequence factory returned the wrong horizon");
  const MetricsSpec& m = config.metrics;
  const auto batches = segment_batches(seq);
  std::vector<EquilibriumPolytope> polytopes;
  for (const Segment& s : seq.segments()) {
    polytopes.push_back(build_polytope(s.game, m.equilibrium, m.epsilon));
  }
  const int n = seq.num_players();
  const double shift = payoff_shift(seq);
  std::vector<std::vector<double>> welfare_tables;
  for (const Segment& s : seq.segments()) welfare_tables.push_back(welfare_table(s.game, m.welfare, shift));
  const long long c_ext = m.external_budget(horizon);
  const std::optional<long long> c_int =
      m.internal_budget ? std::optional<long long>((*m.internal_budget)(horizon)) : std::nullopt;

  std::vector<detail::ReplicationResult> results(config.replications);
  detail::parallel_for(config.replications, config.jobs, [&](int r) {
    std::vector<LearnerPtr> learners = config.profile(seq, horizon);
    const RunTrace trace = play_episode(seq, learners, config.seed, static_cast<std::uint64_t>(r));
    detail::ReplicationResult& out = results[r];
    out.counts = batch_counts(trace, seq);
    if (m.per_replication_distances) {
      for (std::size_t k = 0; k < batches.size(); ++k) {
        const double d =
            distance(JointDistribution::from_counts(out.counts[k]), polytopes[k], m.p).value;
        out.batch_distance.push_back(d);
        out.tracking += batches[k].length() * d;
      }
    }
    for (int i = 0; i < n; ++i) {
      out.external.push_back(realized_regret(trace, seq, i, c_ext, RegretKind::kExternal).regret);
      if (c_int) {
        const RegretReport rep = realized_regret(trace, seq, i, *c_int, RegretKind::kInternal);
        out.internal.push_back(rep.regret);
        out.internal_exact = out.internal_exact && rep.exact;
      }
      if (m.clipped) out.clipped.push_back(clipped_batch_regret(trace, seq, i));
    }
    for (int t = 1; t <= horizon; ++t) {
      out.welfare += welfare_tables[seq.segment_index(t)][trace.outcome(t)];
    }
  });

  ReplicationSummary s;
  s.horizon = horizon;
  s.replications = config.replications;
  s.seed = config.seed;
  s.external_budget = c_ext;
  s.internal_budget = c_int;
  s.welfare_shift = shift;
  s.counts.assign(batches.size(), std::vector<long long>(seq.space().outcome_count(), 0));
  for (const auto& r : results) {
    for (std::size_t k = 0; k < batches.size(); ++k) {
      for (std::size_t a = 0; a < r.counts[k].size(); ++a) s.counts[k][a] += r.counts[k][a];
    }
  }
  for (std::size_t k = 0; k < batches.size(); ++k) {
    BatchSummary b;
    b.interval = batches[k];
    b.mean_distribution = JointDistribution::from_counts(s.counts[k]);
    b.distance = distance(b.mean_distribution, polytopes[k], m.p);
    if (m.per_replication_distances) {
      for (const auto& r : results) b.mean_of_distances += r.batch_distance[k];
      b.mean_of_distances /= config.replications;
    }
    s.tracking_error += b.interval.length() * b.distance.value;
    s.batches.push_back(std::move(b));
  }
  std::vector<double> column;
  if (m.per_replication_distances) {
    for (const auto& r : results) s.replication_tracking.push_back(r.tracking);
    s.tracking_per_replication = estimate(s.replication_tracking);
  }
  auto per_player = [&](auto member) {
    std::vector<Estimate> out;
    for (int i = 0; i < n; ++i) {
      column.clear();
      for (const auto& r : results) column.push_back((r.*member)[i]);
      out.push_back(estimate(column));
    }
    return out;
  };
  s.external_regret = per_player(&detail::ReplicationResult::external);
  if (c_int) {
    s.internal_regret = per_player(&detail::ReplicationResult::internal);
    for (const auto& r : results) s.internal_exact = s.internal_exact && r.internal_exact;
  }
  if (m.clipped) s.clipped_regret = per_player(&detail::ReplicationResult::clipped);
  column.clear();
  for (const auto& r : results) column.push_back(r.welfare);
  s.welfare = estimate(column);
  return s;
}

inline std::vector<ReplicationSummary> convergence_sweep(const SimConfig& config) {
  if (config.grid.empty()) throw ArgumentError("horizon grid is empty");
  if (!std::is_sorted(config.grid.begin(), config.grid.end())) {
    throw ArgumentError("horizon grid must be sorted ascending");
  }
  std::vector<ReplicationSummary> out;
  for (int T : config.grid) out.push_back(monte_carlo(config, T));
  return out;
}

// Plot-facing CSV, one row per (T, batch). Regret and welfare columns are per
// period (divided by T).
inline std::string summary_csv_header(int num_players) {
  std::string h = "T,batch,batch_len,distance,err_per_T";
  for (int i = 1; i <= num_players; ++i) h += ",regret_p" + std::to_string(i);
  h += ",welfare";
  return h;
}

inline void write_summary_csv(std::ostream& os, const std::vector<ReplicationSummary>& rows) {
  if (rows.empty()) throw ArgumentError("nothing to write");
  const int n = static_cast<int>(rows.front().external_regret.size());
  os << summary_csv_header(n) << '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const ReplicationSummary& s : rows) {
    const double T = s.horizon;
    for (std::size_t k = 0; k < s.batches.size(); ++k) {
      os << s.horizon << ',' << (k + 1) << ',' << s.batches[k].interval.length() << ','
         << num(s.batches[k].distance.value) << ',' << num(s.tracking_error / T);
      for (const Estimate& e : s.external_regret) os << ',' << num(e.mean / T);
      os << ',' << num(s.welfare.mean / T) << '\n';
    }
  }
}

}  // namespace eqtrack

#endif  // EQTRACK_SIM_HPP_
