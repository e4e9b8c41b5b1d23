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

#include "eqtrack/lp.hpp"
#include "support/brute_force.hpp"

namespace eqtrack {
namespace {

using lp::Relation;
using lp::Status;

TEST(Simplex, SmallMaximization) {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3
  lp::LinearProgram p;
  p.num_vars = 2;
  p.objective = {-3.0, -2.0};
  p.add({1, 1}, Relation::kLessEqual, 4);
  p.add({1, 3}, Relation::kLessEqual, 6);
  p.add({1, 0}, Relation::kLessEqual, 3);
  const lp::Solution s = lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, -11.0, 1e-12);
  EXPECT_NEAR(s.x[0], 3.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
}

TEST(Simplex, EqualityAndGreaterRows) {
  // min x + 2y + 3z  s.t. x + y + z = 1, y + z >= 0.5, z >= 0.2
  lp::LinearProgram p;
  p.num_vars = 3;
  p.objective = {1, 2, 3};
  p.add({1, 1, 1}, Relation::kEqual, 1);
  p.add({0, 1, 1}, Relation::kGreaterEqual, 0.5);
  p.add({0, 0, 1}, Relation::kGreaterEqual, 0.2);
  const lp::Solution s = lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, 0.5 + 0.3 * 2 + 0.2 * 3, 1e-12);
}

TEST(Simplex, NegativeRightHandSide) {
  // min x  s.t. -x <= -2
  lp::LinearProgram p;
  p.num_vars = 1;
  p.objective = {1};
  p.add({-1}, Relation::kLessEqual, -2);
  const lp::Solution s = lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  lp::LinearProgram p;
  p.num_vars = 2;
  p.objective = {1, 1};
  p.add({1, 1}, Relation::kLessEqual, 1);
  p.add({1, 1}, Relation::kGreaterEqual, 2);
  EXPECT_EQ(lp::solve(p).status, Status::kInfeasible);
}

TEST(Simplex, Unbounded) {
  lp::LinearProgram p;
  p.num_vars = 2;
  p.objective = {-1, 0};
  p.add({1, -1}, Relation::kLessEqual, 1);
  EXPECT_EQ(lp::solve(p).status, Status::kUnbounded);
}

TEST(Simplex, BealeCyclingExampleTerminates) {
  // Cycles under the textbook largest-coefficient rule; Bland's rule ends it.
  lp::LinearProgram p;
  p.num_vars = 4;
  p.objective = {-0.75, 150, -0.02, 6};
  p.add({0.25, -60, -0.04, 9}, Relation::kLessEqual, 0);
  p.add({0.5, -90, -0.02, 3}, Relation::kLessEqual, 0);
  p.add({0, 0, 1, 0}, Relation::kLessEqual, 1);
  const lp::Solution s = lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.value, -0.05, 1e-12);
}

TEST(Simplex, PivotGuardRaisesNumericalError) {
  lp::LinearProgram p;
  p.num_vars = 3;
  p.objective = {-1, -1, -1};
  p.add({1, 1, 1}, Relation::kLessEqual, 1);
  p.add({1, 0, 0}, Relation::kLessEqual, 0.5);
  lp::Options opt;
  opt.max_pivots = 0;
  EXPECT_THROW(lp::solve(p, opt), NumericalError);
}

TEST(Simplex, MatchesVertexEnumerationOnRandomBoxes) {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> coef(-4, 4);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 4);
    lp::LinearProgram p;
    p.num_vars = n;
    std::vector<double> c(n);
    for (double& v : c) v = coef(gen);
    p.objective = c;
    std::vector<std::vector<double>> a_le;
    std::vector<double> b_le;
    for (int r = 0; r < m; ++r) {
      std::vector<double> row(n);
      for (double& v : row) v = coef(gen);
      a_le.push_back(row);
      b_le.push_back(coef(gen) + 2.0);
    }
    for (int j = 0; j < n; ++j) {  // keep the region bounded
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      a_le.push_back(row);
      b_le.push_back(3.0);
    }
    for (std::size_t r = 0; r < a_le.size(); ++r) p.add(a_le[r], Relation::kLessEqual, b_le[r]);
    const lp::Solution s = lp::solve(p);
    const auto ref = brute::vertex_minimum(c, {}, {}, a_le, b_le);
    if (!ref) {
      EXPECT_EQ(s.status, Status::kInfeasible);
      continue;
    }
    ASSERT_EQ(s.status, Status::kOptimal) << "trial " << trial;
    EXPECT_NEAR(s.value, ref->value, 1e-9) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace eqtrack
