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

#include <random>
#include <set>

#include "eqtrack/game.hpp"

namespace eqtrack {
namespace {

using fixtures::kPriceHigh;
using fixtures::kPriceLow;

StageGame random_game(std::mt19937_64& gen, std::vector<int> actions, double bound = 1.0) {
  ActionSpace space(std::move(actions));
  std::uniform_int_distribution<int> pick(-4, 4);
  std::vector<std::vector<double>> u(space.num_players(), std::vector<double>(space.outcome_count()));
  for (auto& row : u)
    for (double& v : row) v = bound * pick(gen) / 4.0;
  return StageGame(space, u, bound);
}

TEST(ActionSpace, LexicographicPlayerZeroMostSignificant) {
  const ActionSpace space({2, 3});
  EXPECT_EQ(space.outcome_count(), 6);
  const std::vector<int> a{1, 2};
  EXPECT_EQ(space.index(a), 5);
  EXPECT_EQ(space.action_of(3, 0), 1);
  EXPECT_EQ(space.action_of(3, 1), 0);
  EXPECT_THROW(ActionSpace({2, 1}), ArgumentError);
}

TEST(LogitPricing, FrozenPayoffs) {
  const StageGame early = fixtures::example1_game(0.75);
  const StageGame late = fixtures::example1_game(1.75);
  // tests/oracles/frozen_values.py
  EXPECT_NEAR(early.payoff(0, 3), 0.9605755775205379, 1e-15);
  EXPECT_NEAR(early.payoff(0, 0), 0.49049080381663274, 1e-15);
  EXPECT_NEAR(early.payoff(0, 1), 0.6617517216734929, 1e-15);
  EXPECT_NEAR(early.payoff(0, 2), 0.6251787590746786, 1e-15);
  EXPECT_NEAR(late.payoff(0, 0), 0.474969301942296, 1e-15);
  EXPECT_NEAR(late.payoff(0, 1), 0.7817549843965904, 1e-15);
  EXPECT_NEAR(late.payoff(0, 2), 0.2716972929012734, 1e-15);
  EXPECT_NEAR(late.payoff(0, 3), 0.7673034623811014, 1e-15);
  // symmetric game
  EXPECT_DOUBLE_EQ(early.payoff(1, 1), early.payoff(0, 2));
}

TEST(LogitPricing, ExampleOneDominance) {
  const StageGame early = fixtures::example1_game(fixtures::kExample1BetaEarly);
  const StageGame late = fixtures::example1_game(fixtures::kExample1BetaLate);
  for (int i = 0; i < 2; ++i) {
    EXPECT_TRUE(is_strictly_dominant(early, i, kPriceHigh));
    EXPECT_TRUE(is_strictly_dominant(late, i, kPriceLow));
  }
  const auto first = single_best_reply(early);
  const auto second = single_best_reply(late);
  ASSERT_TRUE(first[0] && first[1] && second[0] && second[1]);
  EXPECT_EQ(*first[0], kPriceHigh);
  EXPECT_EQ(*first[1], kPriceHigh);
  EXPECT_EQ(*second[0], kPriceLow);
  EXPECT_EQ(*second[1], kPriceLow);
}

TEST(LogitPricing, EqualPricesGiveEqualPayoffs) {
  const StageGame g = logit_pricing_game(4.0, 0.75, 1.0, {1.0, 1.0});
  for (int a = 0; a < 4; ++a) EXPECT_DOUBLE_EQ(g.payoff(0, a), g.payoff(1, a));
}

TEST(LogitPricing, PositiveAndBounded) {
  for (double customers : {0.5, 1.0, 3.0}) {
    const StageGame g = logit_pricing_game(4.0, 1.75, customers, {1.0, 2.0});
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 4; ++a) {
        EXPECT_GT(g.payoff(i, a), 0.0);
        EXPECT_LE(g.payoff(i, a), customers * 2.0);
      }
  }
  EXPECT_THROW(logit_pricing_game(4.0, 0.75, 0.0, {1.0, 2.0}), ArgumentError);
  EXPECT_THROW(logit_pricing_game(4.0, 0.75, -1.0, {1.0, 2.0}), ArgumentError);
}

TEST(Variation, Examples) {
  EXPECT_EQ(variation(GameSequence::constant(fixtures::chicken(), 10)), 0);
  EXPECT_EQ(variation(fixtures::example1_sequence(1000)), 1);
  const StageGame a = fixtures::matching_pennies();
  const StageGame b = fixtures::coordination();
  const GameSequence aba({{a, 1, {}}, {b, 1, {}}, {a, 1, {}}});
  EXPECT_EQ(variation(aba), 2);
}

TEST(Variation, NoiseChangeCounts) {
  const StageGame a = fixtures::chicken();
  const GameSequence seq({{a, 3, NoiseSpec{NoiseSpec::Kind::kGaussian, 0.1}},
                          {a, 3, NoiseSpec{NoiseSpec::Kind::kGaussian, 0.2}}});
  EXPECT_EQ(variation(seq), 1);
}

TEST(SegmentBatches, Examples) {
  const std::vector<Interval> one{{1, 10}};
  EXPECT_EQ(segment_batches(GameSequence::constant(fixtures::chicken(), 10)), one);
  const std::vector<Interval> halves{{1, 5}, {6, 10}};
  EXPECT_EQ(segment_batches(fixtures::example1_sequence(10)), halves);
  const StageGame a = fixtures::matching_pennies();
  const StageGame b = fixtures::coordination();
  const GameSequence aba({{a, 3, {}}, {b, 4, {}}, {a, 3, {}}});
  const std::vector<Interval> three{{1, 3}, {4, 7}, {8, 10}};
  EXPECT_EQ(segment_batches(aba), three);
}

TEST(SegmentBatches, PartitionProperty) {
  std::mt19937_64 gen(5);
  const StageGame pool[] = {fixtures::matching_pennies(), fixtures::chicken(), fixtures::coordination()};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Segment> segs;
    const int parts = 1 + static_cast<int>(gen() % 6);
    for (int s = 0; s < parts; ++s) segs.push_back({pool[gen() % 3], 1 + static_cast<int>(gen() % 5), {}});
    const GameSequence seq(segs);
    const auto batches = segment_batches(seq);
    EXPECT_EQ(static_cast<int>(batches.size()), variation(seq) + 1);
    int next = 1;
    for (const Interval& b : batches) {
      EXPECT_EQ(b.first, next);
      EXPECT_GE(b.last, b.first);
      next = b.last + 1;
    }
    EXPECT_EQ(next, seq.horizon() + 1);
  }
}

TEST(SingleBestReply, MatchingPenniesHasNone) {
  const auto r = single_best_reply(fixtures::matching_pennies());
  EXPECT_FALSE(r[0].has_value());
  EXPECT_FALSE(r[1].has_value());
  EXPECT_FALSE(is_single_best_reply(fixtures::matching_pennies()));
}

TEST(SingleBestReply, AppendixGammaTwoTieBreak) {
  const auto r = single_best_reply(fixtures::appendix_e_gamma2(0.1));
  ASSERT_TRUE(r[0] && r[1]);
  EXPECT_EQ(*r[0], 0);  // u
  EXPECT_EQ(*r[1], 0);  // c, lowest of two qualifying actions
}

TEST(MakeInjective, TwoByTwoOffsetsAndScale) {
  const InjectiveTransform tr = injective_transform(fixtures::matching_pennies(), 0);
  EXPECT_DOUBLE_EQ(tr.scale, 5.0);
  ASSERT_EQ(tr.offsets.size(), 2u);
  EXPECT_DOUBLE_EQ(tr.offsets[0], 1.0);
  EXPECT_DOUBLE_EQ(tr.offsets[1], 4.0);
}

TEST(MakeInjective, InjectiveAndArgmaxPreserving) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<int> acts{2 + static_cast<int>(gen() % 2), 2 + static_cast<int>(gen() % 2),
                                trial % 3 == 0 ? 2 : 0};
    std::vector<int> a = acts;
    if (a.back() == 0) a.pop_back();
    const StageGame g = random_game(gen, a);
    const int player = static_cast<int>(gen() % a.size());
    const StageGame h = make_injective(g, player);
    const ActionSpace& space = g.space();
    for (int i = 0; i < space.num_players(); ++i) {
      if (i == player) continue;
      EXPECT_EQ(h.payoffs()[i], g.payoffs()[i]);
    }
    // x-sections injective in the opponent profile
    for (int x = 0; x < space.num_actions(player); ++x) {
      std::set<double> seen;
      int count = 0;
      for (int o = 0; o < space.outcome_count(); ++o) {
        if (space.action_of(o, player) != x) continue;
        seen.insert(h.payoff(player, o));
        ++count;
      }
      EXPECT_EQ(static_cast<int>(seen.size()), count);
    }
    // argmax sets per opponent profile unchanged
    for (int o = 0; o < space.outcome_count(); ++o) {
      if (space.action_of(o, player) != 0) continue;
      std::set<int> best_g, best_h;
      double mg = -1e300, mh = -1e300;
      for (int x = 0; x < space.num_actions(player); ++x) {
        const int d = space.with_action(o, player, x);
        mg = std::max(mg, g.payoff(player, d));
        mh = std::max(mh, h.payoff(player, d));
      }
      for (int x = 0; x < space.num_actions(player); ++x) {
        const int d = space.with_action(o, player, x);
        if (g.payoff(player, d) == mg) best_g.insert(x);
        if (std::abs(h.payoff(player, d) - mh) <= 1e-12 * std::abs(mh)) best_h.insert(x);
      }
      EXPECT_EQ(best_g, best_h);
    }
    // idempotent in the weak sense: still injective
    const StageGame hh = make_injective(h, player);
    for (int x = 0; x < space.num_actions(player); ++x) {
      std::set<double> seen;
      int count = 0;
      for (int o = 0; o < space.outcome_count(); ++o) {
        if (space.action_of(o, player) != x) continue;
        seen.insert(hh.payoff(player, o));
        ++count;
      }
      EXPECT_EQ(static_cast<int>(seen.size()), count);
    }
  }
}

TEST(StageGame, EqualityIsExact) {
  const StageGame a = fixtures::chicken();
  StageGame b = fixtures::chicken();
  EXPECT_TRUE(a == b);
  auto u = a.payoffs();
  u[0][0] = std::nextafter(u[0][0], 2.0);
  EXPECT_FALSE(a == StageGame(a.space(), u, a.bound()));
}

TEST(StageGame, RejectsOutOfBound) {
  EXPECT_THROW(StageGame(ActionSpace({2, 2}), {{0, 0, 0, 2}, {0, 0, 0, 0}}, 1.0), ArgumentError);
}

TEST(GameSequence, ExampleOneHalves) {
  const GameSequence seq = fixtures::example1_sequence(12);
  EXPECT_EQ(seq.horizon(), 12);
  EXPECT_EQ(payoff(seq, 1, 0, 3), fixtures::example1_game(0.75).payoff(0, 3));
  EXPECT_EQ(payoff(seq, 12, 0, 0), fixtures::example1_game(1.75).payoff(0, 0));
}

}  // namespace
}  // namespace eqtrack
