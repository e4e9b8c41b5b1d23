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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "eqtrack/sim.hpp"

namespace eqtrack {
namespace {

SimConfig exp3s_example1(int reps, std::uint64_t seed) {
  SimConfig c;
  c.sequence = [](int T) { return fixtures::example1_sequence(T); };
  c.profile = [](const GameSequence&, int T) {
    const Exp3Tuning t = fig2_tuning(T);
    std::vector<LearnerPtr> out;
    for (int i = 0; i < 2; ++i) out.push_back(std::make_unique<Exp3S>(2, t.gamma, t.alpha, 1.0));
    return out;
  };
  c.replications = reps;
  c.seed = seed;
  return c;
}

SimConfig scripted(GameSequence seq, ActionSchedule row, ActionSchedule col) {
  SimConfig c;
  c.sequence = [seq](int) { return seq; };
  c.profile = [row, col](const GameSequence&, int) {
    std::vector<LearnerPtr> out;
    out.push_back(std::make_unique<ScriptedPolicy>(2, row));
    out.push_back(std::make_unique<ScriptedPolicy>(2, col));
    return out;
  };
  c.replications = 3;
  return c;
}

void expect_same(const ReplicationSummary& a, const ReplicationSummary& b) {
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.tracking_error, b.tracking_error);
  EXPECT_EQ(a.replication_tracking, b.replication_tracking);
  ASSERT_EQ(a.external_regret.size(), b.external_regret.size());
  for (std::size_t i = 0; i < a.external_regret.size(); ++i) {
    EXPECT_EQ(a.external_regret[i].mean, b.external_regret[i].mean);
    EXPECT_EQ(a.external_regret[i].se, b.external_regret[i].se);
  }
  EXPECT_EQ(a.welfare.mean, b.welfare.mean);
}

TEST(MonteCarlo, DeterministicForSeed) {
  const SimConfig c = exp3s_example1(6, 42);
  expect_same(monte_carlo(c, 400), monte_carlo(c, 400));
  const SimConfig other = exp3s_example1(6, 43);
  EXPECT_NE(monte_carlo(c, 400).counts, monte_carlo(other, 400).counts);
}

TEST(MonteCarlo, JobsDoNotChangeResults) {
  SimConfig one = exp3s_example1(9, 5);
  SimConfig many = one;
  many.jobs = 4;
  expect_same(monte_carlo(one, 300), monte_carlo(many, 300));
}

TEST(MonteCarlo, SingleReplicationMatchesEpisode) {
  const SimConfig c = exp3s_example1(1, 77);
  const int T = 200;
  const GameSequence seq = c.sequence(T);
  auto learners = c.profile(seq, T);
  const RunTrace trace = play_episode(seq, learners, 77, 0);
  const ReplicationSummary s = monte_carlo(c, T);
  EXPECT_EQ(s.counts, batch_counts(trace, seq));
  EXPECT_DOUBLE_EQ(s.external_regret[0].mean,
                   realized_regret(trace, seq, 0, 1, RegretKind::kExternal).regret);
  EXPECT_EQ(s.external_regret[0].se, 0.0);
  double tracking = 0.0;
  const auto batches = segment_batches(seq);
  const auto counts = batch_counts(trace, seq);
  for (std::size_t k = 0; k < batches.size(); ++k) {
    const auto poly = build_polytope(seq.segments()[k].game, EquilibriumKind::kHannan, 0.0);
    tracking += batches[k].length() * distance(JointDistribution::from_counts(counts[k]), poly, PNorm::kTwo).value;
  }
  EXPECT_NEAR(s.tracking_error, tracking, 1e-12);
}

TEST(MonteCarlo, ReplicationsShareRandomStreamsAcrossRuns) {
  // Replication r is a fixed function of (seed, r): the first reps of a larger
  // run reproduce a smaller one.
  const SimConfig small = exp3s_example1(3, 8);
  const SimConfig big = exp3s_example1(6, 8);
  const auto a = monte_carlo(small, 150);
  const auto b = monte_carlo(big, 150);
  for (int r = 0; r < 3; ++r) EXPECT_EQ(a.replication_tracking[r], b.replication_tracking[r]);
}

TEST(MonteCarlo, DominantNashScriptTracksExactly) {
  const int T = 40;
  auto row = [T](long long t) { return t <= T / 2 ? fixtures::kPriceHigh : fixtures::kPriceLow; };
  const SimConfig c = scripted(fixtures::example1_sequence(T), row, row);
  const ReplicationSummary s = monte_carlo(c, T);
  EXPECT_EQ(s.tracking_error, 0.0);
  for (const auto& b : s.batches) EXPECT_EQ(b.distance.value, 0.0);
  EXPECT_EQ(s.tracking_per_replication.mean, 0.0);
  EXPECT_LE(s.external_regret[0].mean, 1e-12);
}

TEST(MonteCarlo, MeanDistributionsSumToOne) {
  const ReplicationSummary s = monte_carlo(exp3s_example1(5, 3), 120);
  ASSERT_EQ(s.batches.size(), 2u);
  for (const auto& b : s.batches) {
    double total = 0.0;
    for (double q : b.mean_distribution.probabilities()) total += q;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  long long n = 0;
  for (const auto& c : s.counts)
    for (long long v : c) n += v;
  EXPECT_EQ(n, 5LL * 120);
}

TEST(MonteCarlo, TriggerProfileHitsTargetAtCycleMultiples) {
  const StageGame g = fixtures::chicken();
  const std::vector<TargetMass> target{{0, 2}, {1, 1}, {2, 1}};
  SimConfig c;
  c.sequence = [g](int T) { return GameSequence::constant(g, T); };
  c.profile = [g, target](const GameSequence&, int T) {
    std::vector<LearnerPtr> out;
    for (int i = 0; i < 2; ++i) {
      out.push_back(std::make_unique<TriggerPolicy>(g, i, target,
                                                    std::make_unique<Exp3>(2, fig1_tuning(T, 2).gamma, 1.0)));
    }
    return out;
  };
  c.replications = 4;
  for (int T : {4, 40, 400}) {
    const ReplicationSummary s = monte_carlo(c, T);
    EXPECT_EQ(s.tracking_error, 0.0) << T;
    const auto& q = s.batches[0].mean_distribution.probabilities();
    EXPECT_EQ(q[0], 0.5);
    EXPECT_EQ(q[1], 0.25);
    EXPECT_EQ(q[2], 0.25);
    EXPECT_EQ(q[3], 0.0);
  }
}

TEST(MonteCarlo, StandardErrorShrinksWithReplications) {
  const auto few = monte_carlo(exp3s_example1(40, 100), 300);
  const auto many = monte_carlo(exp3s_example1(160, 100), 300);
  const double ratio = many.external_regret[0].se / few.external_regret[0].se;
  EXPECT_NEAR(ratio, 0.5, 0.15);
}

TEST(Sweep, SingleHorizonEqualsMonteCarlo) {
  SimConfig c = exp3s_example1(4, 12);
  c.grid = {500};
  const auto rows = convergence_sweep(c);
  ASSERT_EQ(rows.size(), 1u);
  expect_same(rows[0], monte_carlo(c, 500));
}

TEST(Sweep, RejectsUnsortedGrid) {
  SimConfig c = exp3s_example1(1, 1);
  c.grid = {200, 100};
  EXPECT_THROW(convergence_sweep(c), ArgumentError);
  c.grid.clear();
  EXPECT_THROW(convergence_sweep(c), ArgumentError);
}

TEST(MonteCarlo, BatchBestReplyKeepsTrackingErrorPerPeriod) {
  // A row learner that is exploited by the column's batch best reply keeps a
  // constant error rate instead of vanishing.
  SimConfig c;
  c.sequence = [](int T) { return fixtures::example1_sequence(T); };
  c.profile = [](const GameSequence&, int T) {
    std::vector<LearnerPtr> out;
    out.push_back(std::make_unique<Exp3>(2, fig1_tuning(T, 2).gamma, 1.0));
    out.push_back(std::make_unique<ScriptedPolicy>(2, [T](long long t) { return t <= T / 2 ? fixtures::kPriceHigh : fixtures::kPriceLow; }));
    return out;
  };
  c.replications = 10;
  const double small = monte_carlo(c, 1000).tracking_error / 1000.0;
  const double large = monte_carlo(c, 20000).tracking_error / 20000.0;
  EXPECT_GT(small, 0.0);
  EXPECT_GE(large, 0.5 * small);
}

TEST(Csv, HeaderAndRows) {
  EXPECT_EQ(summary_csv_header(2), "T,batch,batch_len,distance,err_per_T,regret_p1,regret_p2,welfare");
  SimConfig c = exp3s_example1(2, 4);
  c.grid = {100, 200};
  std::ostringstream os;
  write_summary_csv(os, convergence_sweep(c));
  std::istringstream in(os.str());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line, summary_csv_header(2));
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
  }
  EXPECT_EQ(lines, 4);
}

TEST(MonteCarlo, RejectsBadConfigs) {
  SimConfig c = exp3s_example1(0, 1);
  EXPECT_THROW(monte_carlo(c, 10), ArgumentError);
  c.replications = 1;
  c.sequence = [](int) { return fixtures::example1_sequence(8); };
  EXPECT_THROW(monte_carlo(c, 10), ArgumentError);
}

}  // namespace
}  // namespace eqtrack
