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

#ifndef EQTRACK_LP_HPP_
#define EQTRACK_LP_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "eqtrack/errors.hpp"

namespace eqtrack::lp {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// minimize objective . x  subject to the constraints and x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;

  void add(std::vector<double> coefficients, Relation relation, double rhs) {
    constraints.push_back({std::move(coefficients), relation, rhs});
  }
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
  }
  return "unknown";
}

struct Solution {
  Status status = Status::kInfeasible;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x;  // a basic feasible solution when optimal
  int pivots = 0;
};

struct Options {
  double pivot_tolerance = 1e-11;
  double cost_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  int max_pivots = 50000;
};

namespace detail {

// Dense tableau. Row i holds B^{-1}A in columns [0, cols) and B^{-1}b in
// column `cols`. The cost row holds reduced costs and -z in its last entry.
class Tableau {
 public:
  Tableau(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * (cols + 1)),
        cost_(cols + 1, 0.0), basis_(rows, -1) {}

  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
  double at(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * (cols_ + 1) + j];
  }
  double& rhs(int i) { return at(i, cols_); }
  double rhs(int i) const { return at(i, cols_); }
  std::vector<double>& cost() { return cost_; }
  std::vector<int>& basis() { return basis_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set_costs(const std::vector<double>& c) {
    for (int j = 0; j <= cols_; ++j) cost_[j] = j < cols_ ? c[j] : 0.0;
    for (int i = 0; i < rows_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) cost_[j] -= cb * at(i, j);
    }
  }

  void pivot(int r, int s) {
    const double p = at(r, s);
    for (int j = 0; j <= cols_; ++j) at(r, j) /= p;
    at(r, s) = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, s);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, s) = 0.0;
    }
    const double f = cost_[s];
    if (f != 0.0) {
      for (int j = 0; j <= cols_; ++j) cost_[j] -= f * at(r, j);
      cost_[s] = 0.0;
    }
    basis_[r] = s;
  }

  void drop_row(int r) {
    const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(r) * (cols_ + 1);
    data_.erase(begin, begin + (cols_ + 1));
    basis_.erase(basis_.begin() + r);
    --rows_;
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
  std::vector<double> cost_;
  std::vector<int> basis_;
};

// Bland's rule: lowest-index improving column, then lowest basic index among
// ratio ties. Returns false when the LP is unbounded along the entering column.
inline bool run_simplex(Tableau& tab, const std::vector<bool>& allowed,
                        const Options& opt, int& pivots) {
  for (;;) {
    int entering = -1;
    for (int j = 0; j < tab.cols(); ++j) {
      if (allowed[j] && tab.cost()[j] < -opt.cost_tolerance) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return true;
    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.rows(); ++i) {
      const double a = tab.at(i, entering);
      if (a <= opt.pivot_tolerance) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / a;
      if (ratio < best_ratio - 1e-14 ||
          (std::abs(ratio - best_ratio) <= 1e-14 && leaving >= 0 &&
           tab.basis()[i] < tab.basis()[leaving])) {
        best_ratio = ratio;
        leaving = i;
      }
    }
    if (leaving < 0) return false;
    if (++pivots > opt.max_pivots) {
      throw NumericalError("simplex pivot limit exceeded (" +
                           std::to_string(opt.max_pivots) + " pivots, " +
                           std::to_string(tab.rows()) + " rows, " +
                           std::to_string(tab.cols()) + " columns)");
    }
    tab.pivot(leaving, entering);
  }
}

}  // namespace detail

// Two-phase dense simplex.
inline Solution solve(const LinearProgram& lp, const Options& opt = {}) {
  const int n = lp.num_vars;
  if (static_cast<int>(lp.objective.size()) != n) {
    throw ArgumentError("objective length does not match the variable count");
  }
  const int m = static_cast<int>(lp.constraints.size());
  std::vector<Constraint> rows = lp.constraints;
  int slack_count = 0;
  int artificial_count = 0;
  for (auto& row : rows) {
    if (static_cast<int>(row.coefficients.size()) != n) {
      throw ArgumentError("constraint length does not match the variable count");
    }
    if (row.rhs < 0.0) {
      for (double& v : row.coefficients) v = -v;
      row.rhs = -row.rhs;
      if (row.relation == Relation::kLessEqual) {
        row.relation = Relation::kGreaterEqual;
      } else if (row.relation == Relation::kGreaterEqual) {
        row.relation = Relation::kLessEqual;
      }
    }
    if (row.relation != Relation::kEqual) ++slack_count;
    if (row.relation != Relation::kLessEqual) ++artificial_count;
  }
  const int cols = n + slack_count + artificial_count;
  detail::Tableau tab(m, cols);
  int next_slack = n;
  int next_artificial = n + slack_count;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) tab.at(i, j) = rows[i].coefficients[j];
    tab.rhs(i) = rows[i].rhs;
    switch (rows[i].relation) {
      case Relation::kLessEqual:
        tab.at(i, next_slack) = 1.0;
        tab.basis()[i] = next_slack++;
        break;
      case Relation::kGreaterEqual:
        tab.at(i, next_slack++) = -1.0;
        tab.at(i, next_artificial) = 1.0;
        tab.basis()[i] = next_artificial++;
        break;
      case Relation::kEqual:
        tab.at(i, next_artificial) = 1.0;
        tab.basis()[i] = next_artificial++;
        break;
    }
  }
  const int first_artificial = n + slack_count;
  Solution sol;
  std::vector<bool> allowed(cols, true);

  if (artificial_count > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (int j = first_artificial; j < cols; ++j) phase1[j] = 1.0;
    tab.set_costs(phase1);
    if (!detail::run_simplex(tab, allowed, opt, sol.pivots)) {
      throw InternalError("phase-one simplex reported an unbounded objective");
    }
    if (-tab.cost()[cols] > opt.feasibility_tolerance) {
      sol.status = Status::kInfeasible;
      return sol;
    }
    // Pivot zero-level artificials out of the basis; rows where that is
    // impossible are linearly dependent and get dropped.
    for (int i = 0; i < tab.rows();) {
      if (tab.basis()[i] < first_artificial) {
        ++i;
        continue;
      }
      int column = -1;
      for (int j = 0; j < first_artificial; ++j) {
        if (std::abs(tab.at(i, j)) > opt.pivot_tolerance) {
          column = j;
          break;
        }
      }
      if (column >= 0) {
        tab.pivot(i, column);
        ++sol.pivots;
        ++i;
      } else {
        tab.drop_row(i);
      }
    }
    for (int j = first_artificial; j < cols; ++j) allowed[j] = false;
  }

  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = lp.objective[j];
  tab.set_costs(phase2);
  if (!detail::run_simplex(tab, allowed, opt, sol.pivots)) {
    sol.status = Status::kUnbounded;
    sol.value = -std::numeric_limits<double>::infinity();
    return sol;
  }
  sol.status = Status::kOptimal;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < tab.rows(); ++i) {
    if (tab.basis()[i] < n) sol.x[tab.basis()[i]] = std::max(tab.rhs(i), 0.0);
  }
  sol.value = 0.0;
  for (int j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
  return sol;
}

}  // namespace eqtrack::lp

#endif  // EQTRACK_LP_HPP_
