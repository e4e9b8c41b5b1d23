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

#ifndef EQTRACK_EQUILIBRIUM_HPP_
#define EQTRACK_EQUILIBRIUM_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "eqtrack/errors.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/lp.hpp"
#include "eqtrack/rng.hpp"

namespace eqtrack {

// Probability vector over outcomes in lexicographic order.
class JointDistribution {
 public:
  JointDistribution() = default;

  // Entries down to -1e-12 are clamped to zero and a sum within 1e-9 of one
  // is renormalized; anything worse is rejected.
  explicit JointDistribution(std::vector<double> probabilities)
      : p_(std::move(probabilities)) {
    if (p_.empty()) throw ArgumentError("distribution is empty");
    double sum = 0.0;
    for (double& v : p_) {
      if (!std::isfinite(v) || v < -1e-12) {
        throw ArgumentError("distribution has a negative or non-finite entry");
      }
      v = std::max(v, 0.0);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ArgumentError("distribution does not sum to one");
    }
    if (sum != 1.0) {
      for (double& v : p_) v /= sum;
    }
  }

  static JointDistribution point_mass(int outcome_count, int outcome) {
    if (outcome < 0 || outcome >= outcome_count) {
      throw ArgumentError("outcome index out of range");
    }
    std::vector<double> p(outcome_count, 0.0);
    p[outcome] = 1.0;
    return JointDistribution(std::move(p));
  }

  static JointDistribution uniform(int outcome_count) {
    return JointDistribution(std::vector<double>(outcome_count, 1.0 / outcome_count));
  }

  // Empirical distribution from integer counts; one division per entry keeps
  // rational frequencies correctly rounded.
  static JointDistribution from_counts(std::span<const long long> counts) {
    long long total = 0;
    for (long long c : counts) {
      if (c < 0) throw ArgumentError("negative outcome count");
      total += c;
    }
    if (total <= 0) throw ArgumentError("no outcomes counted");
    std::vector<double> p(counts.size());
    for (std::size_t a = 0; a < counts.size(); ++a) {
      p[a] = static_cast<double>(counts[a]) / static_cast<double>(total);
    }
    JointDistribution d;
    d.p_ = std::move(p);
    return d;
  }

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int a) const { return p_[a]; }
  const std::vector<double>& probabilities() const { return p_; }

 private:
  std::vector<double> p_;
};

enum class EquilibriumKind { kHannan, kCorrelated };

inline std::string to_string(EquilibriumKind kind) {
  return kind == EquilibriumKind::kHannan ? "hannan" : "ce";
}

inline EquilibriumKind parse_equilibrium_kind(const std::string& s) {
  if (s == "hannan" || s == "cce") return EquilibriumKind::kHannan;
  if (s == "ce" || s == "correlated") return EquilibriumKind::kCorrelated;
  throw ArgumentError("unknown equilibrium kind '" + s + "'");
}

enum class PNorm { kOne, kTwo, kInf };

inline std::string to_string(PNorm p) {
  switch (p) {
    case PNorm::kOne: return "1";
    case PNorm::kTwo: return "2";
    case PNorm::kInf: return "inf";
  }
  return "?";
}

inline PNorm parse_p_norm(const std::string& s) {
  if (s == "1") return PNorm::kOne;
  if (s == "2") return PNorm::kTwo;
  if (s == "inf" || s == "infinity") return PNorm::kInf;
  throw ArgumentError("p-norm must be 1, 2 or inf (got '" + s + "')");
}

inline double norm(std::span<const double> v, PNorm p) {
  double acc = 0.0;
  for (double x : v) {
    switch (p) {
      case PNorm::kOne: acc += std::abs(x); break;
      case PNorm::kTwo: acc += x * x; break;
      case PNorm::kInf: acc = std::max(acc, std::abs(x)); break;
    }
  }
  return p == PNorm::kTwo ? std::sqrt(acc) : acc;
}

// Diameter of the simplex in the p-norm: 2^{1/p}.
inline double simplex_diameter(PNorm p) {
  switch (p) {
    case PNorm::kOne: return 2.0;
    case PNorm::kTwo: return std::sqrt(2.0);
    case PNorm::kInf: return 1.0;
  }
  return 0.0;
}

// {q in simplex : R q <= epsilon}. Hannan rows are indexed by (player, x) with
// entries u^i(x, a^{-i}) - u^i(a); correlated rows by (player, x, y) with
// entries 1(a^i = x)(u^i(y, a^{-i}) - u^i(x, a^{-i})).
struct EquilibriumPolytope {
  EquilibriumKind kind = EquilibriumKind::kHannan;
  double epsilon = 0.0;
  int outcome_count = 0;
  std::vector<std::vector<double>> rows;
  StageGame game;
};

inline lp::LinearProgram polytope_program(const EquilibriumPolytope& poly,
                                          int extra_vars = 0) {
  lp::LinearProgram prog;
  const int n = poly.outcome_count;
  prog.num_vars = n + extra_vars;
  prog.objective.assign(prog.num_vars, 0.0);
  std::vector<double> ones(prog.num_vars, 0.0);
  std::fill(ones.begin(), ones.begin() + n, 1.0);
  prog.add(std::move(ones), lp::Relation::kEqual, 1.0);
  for (const auto& row : poly.rows) {
    std::vector<double> coeffs(prog.num_vars, 0.0);
    std::copy(row.begin(), row.end(), coeffs.begin());
    prog.add(std::move(coeffs), lp::Relation::kLessEqual, poly.epsilon);
  }
  return prog;
}

// Vertex of the polytope minimizing direction . q.
inline std::vector<double> linear_minimize(const EquilibriumPolytope& poly,
                                           std::span<const double> direction,
                                           double* value = nullptr) {
  lp::LinearProgram prog = polytope_program(poly);
  prog.objective.assign(direction.begin(), direction.end());
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw InternalError("linear minimization over an equilibrium polytope failed: " +
                        lp::to_string(sol.status));
  }
  if (value) *value = sol.value;
  return sol.x;
}

inline EquilibriumPolytope build_polytope(const StageGame& game, EquilibriumKind kind,
                                          double epsilon = 0.0) {
  if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be non-negative");
  const ActionSpace& space = game.space();
  EquilibriumPolytope poly;
  poly.kind = kind;
  poly.epsilon = epsilon;
  poly.outcome_count = space.outcome_count();
  poly.game = game;
  const int n = space.outcome_count();
  for (int i = 0; i < space.num_players(); ++i) {
    const int k = space.num_actions(i);
    if (kind == EquilibriumKind::kHannan) {
      for (int x = 0; x < k; ++x) {
        std::vector<double> row(n);
        for (int a = 0; a < n; ++a) {
          row[a] = game.deviation_payoff(i, x, a) - game.payoff(i, a);
        }
        poly.rows.push_back(std::move(row));
      }
    } else {
      for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) {
          std::vector<double> row(n, 0.0);
          for (int a = 0; a < n; ++a) {
            if (space.action_of(a, i) != x) continue;
            row[a] = game.deviation_payoff(i, y, a) - game.payoff(i, a);
          }
          poly.rows.push_back(std::move(row));
        }
      }
    }
  }
  const lp::Solution feas = lp::solve(polytope_program(poly));
  if (feas.status != lp::Status::kOptimal) {
    throw InternalError("equilibrium polytope reported empty; solver bug");
  }
  return poly;
}

inline double max_violation(const JointDistribution& q, const EquilibriumPolytope& poly) {
  if (q.size() != poly.outcome_count) {
    throw ArgumentError("distribution and polytope dimensions differ");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& row : poly.rows) {
    double v = 0.0;
    for (int a = 0; a < poly.outcome_count; ++a) v += row[a] * q[a];
    worst = std::max(worst, v);
  }
  return worst;
}

inline bool membership(const JointDistribution& q, const EquilibriumPolytope& poly,
                       double tol = 1e-9) {
  if (!(tol >= 0.0)) throw ArgumentError("tolerance must be non-negative");
  return max_violation(q, poly) <= poly.epsilon + tol;
}

struct DistanceReport {
  double value = 0.0;
  std::vector<double> witness;
  double gap_certificate = 0.0;  // Frank-Wolfe duality gap on ||x - q||^2; 0 for LP
  int iterations = 0;
  PNorm p = PNorm::kTwo;
};

// Global tally of Frank-Wolfe certificates, so test suites can assert the gap
// bound over every distance evaluation they triggered.
class DistanceAudit {
 public:
  static DistanceAudit& instance() {
    static DistanceAudit audit;
    return audit;
  }

  void record(double gap) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    double seen = max_gap_.load(std::memory_order_relaxed);
    while (gap > seen &&
           !max_gap_.compare_exchange_weak(seen, gap, std::memory_order_relaxed)) {
    }
  }

  long long calls() const { return calls_.load(); }
  double max_gap() const { return max_gap_.load(); }

 private:
  std::atomic<long long> calls_{0};
  std::atomic<double> max_gap_{0.0};
};

struct FrankWolfeOptions {
  double gap_tolerance = 1e-8;
  int max_iterations = 100000;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Away-step Frank-Wolfe on f(x) = ||x - q||_2^2 with exact line search.
inline DistanceReport frank_wolfe_l2(const JointDistribution& q,
                                     const EquilibriumPolytope& poly,
                                     const FrankWolfeOptions& opt) {
  const int n = poly.outcome_count;
  const std::vector<double>& target = q.probabilities();
  std::vector<double> negated(n);
  for (int a = 0; a < n; ++a) negated[a] = -target[a];

  struct Atom {
    std::vector<double> vertex;
    double weight;
  };
  std::vector<Atom> active{{linear_minimize(poly, negated), 1.0}};
  std::vector<double> x = active.front().vertex;
  std::vector<double> grad(n), d(n);
  DistanceReport report;
  report.p = PNorm::kTwo;
  double gap = std::numeric_limits<double>::infinity();

  auto same_vertex = [](const std::vector<double>& u, const std::vector<double>& v) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (std::abs(u[i] - v[i]) > 1e-12) return false;
    }
    return true;
  };

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    for (int a = 0; a < n; ++a) grad[a] = 2.0 * (x[a] - target[a]);
    std::vector<double> s = linear_minimize(poly, grad);
    gap = dot(grad, x) - dot(grad, s);
    if (gap <= opt.gap_tolerance) break;

    std::size_t away = 0;
    double away_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < active.size(); ++j) {
      const double score = dot(grad, active[j].vertex);
      if (score > away_score) {
        away_score = score;
        away = j;
      }
    }
    const double away_gap = away_score - dot(grad, x);
    const bool toward = gap >= away_gap || active.size() == 1;
    double step_max;
    if (toward) {
      for (int a = 0; a < n; ++a) d[a] = s[a] - x[a];
      step_max = 1.0;
    } else {
      for (int a = 0; a < n; ++a) d[a] = x[a] - active[away].vertex[a];
      const double w = active[away].weight;
      step_max = w / (1.0 - w);
    }
    const double dd = dot(d, d);
    if (dd <= 0.0) break;
    const double step = std::clamp(-dot(grad, d) / (2.0 * dd), 0.0, step_max);
    for (int a = 0; a < n; ++a) x[a] += step * d[a];

    if (toward) {
      for (auto& atom : active) atom.weight *= (1.0 - step);
      if (step >= 1.0) {
        active.assign(1, Atom{std::move(s), 1.0});
      } else {
        auto hit = std::find_if(active.begin(), active.end(),
                                [&](const Atom& at) { return same_vertex(at.vertex, s); });
        if (hit != active.end()) {
          hit->weight += step;
        } else {
          active.push_back({std::move(s), step});
        }
      }
    } else {
      for (auto& atom : active) atom.weight *= (1.0 + step);
      active[away].weight -= step;
      if (step >= step_max) active.erase(active.begin() + static_cast<std::ptrdiff_t>(away));
    }
    active.erase(std::remove_if(active.begin(), active.end(),
                                [](const Atom& at) { return at.weight <= 0.0; }),
                 active.end());
  }
  std::vector<double> diff(n);
  for (int a = 0; a < n; ++a) diff[a] = x[a] - target[a];
  report.value = norm(diff, PNorm::kTwo);
  report.witness = std::move(x);
  report.gap_certificate = std::max(gap, 0.0);
  report.iterations = it + 1;
  return report;
}

// Exact LP for the 1- and inf-norm distances.
inline DistanceReport lp_distance(const JointDistribution& q,
                                  const EquilibriumPolytope& poly, PNorm p) {
  const int n = poly.outcome_count;
  const int extra = p == PNorm::kOne ? n : 1;
  lp::LinearProgram prog = polytope_program(poly, extra);
  for (int j = n; j < n + extra; ++j) prog.objective[j] = 1.0;
  for (int a = 0; a < n; ++a) {
    const int aux = p == PNorm::kOne ? n + a : n;
    std::vector<double> upper(n + extra, 0.0), lower(n + extra, 0.0);
    upper[aux] = 1.0;
    upper[a] = -1.0;  // aux - x_a >= -q_a
    lower[aux] = 1.0;
    lower[a] = 1.0;  // aux + x_a >= q_a
    prog.add(std::move(upper), lp::Relation::kGreaterEqual, -q[a]);
    prog.add(std::move(lower), lp::Relation::kGreaterEqual, q[a]);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw InternalError("distance LP failed: " + lp::to_string(sol.status));
  }
  DistanceReport report;
  report.p = p;
  report.witness.assign(sol.x.begin(), sol.x.begin() + n);
  std::vector<double> diff(n);
  for (int a = 0; a < n; ++a) diff[a] = report.witness[a] - q[a];
  report.value = norm(diff, p);
  report.iterations = sol.pivots;
  return report;
}

}  // namespace detail

// d_p(q, P) with a feasible witness. Members (violation <= 1e-12) short-cut to
// zero.
inline DistanceReport distance(const JointDistribution& q, const EquilibriumPolytope& poly,
                               PNorm p, const FrankWolfeOptions& opt = {}) {
  if (q.size() != poly.outcome_count) {
    throw ArgumentError("distribution and polytope dimensions differ");
  }
  if (membership(q, poly, 1e-12)) {
    DistanceReport report;
    report.p = p;
    report.witness = q.probabilities();
    if (p == PNorm::kTwo) DistanceAudit::instance().record(0.0);
    return report;
  }
  if (p != PNorm::kTwo) return detail::lp_distance(q, poly, p);
  DistanceReport report = detail::frank_wolfe_l2(q, poly, opt);
  DistanceAudit::instance().record(report.gap_certificate);
  return report;
}

struct TrackingReport {
  double total = 0.0;  // sum_k |T_(k)| d_p(delta_(k), E_(k))
  std::vector<Interval> batches;
  std::vector<DistanceReport> per_batch;
};

// Tracking error of per-batch distributions against the batch equilibrium
// sets built at slack `epsilon`.
inline TrackingReport tracking_error(const GameSequence& seq,
                                     std::span<const JointDistribution> batch_dists,
                                     EquilibriumKind kind, PNorm p, double epsilon = 0.0) {
  TrackingReport report;
  report.batches = segment_batches(seq);
  if (batch_dists.size() != report.batches.size()) {
    throw ArgumentError("need one distribution per batch (" +
                        std::to_string(report.batches.size()) + "), got " +
                        std::to_string(batch_dists.size()));
  }
  for (std::size_t k = 0; k < report.batches.size(); ++k) {
    const EquilibriumPolytope poly =
        build_polytope(seq.segments()[k].game, kind, epsilon);
    report.per_batch.push_back(distance(batch_dists[k], poly, p));
    report.total += report.batches[k].length() * report.per_batch.back().value;
  }
  return report;
}

struct DistanceBound {
  double bound = 0.0;               // min(constant * eps, 2^{1/p})
  double cap = 0.0;                 // 2^{1/p}
  double empirical_constant = 0.0;  // sup over probed eps-members of d/eps
  std::vector<double> worst_point;
  int probes = 0;
};

// Estimates const(Gamma) as the largest observed d_p(q, E_0)/eps over probes q
// of the relaxed set: its point masses and vertices along seeded random
// directions. Probing happens at the requested eps and at a small reference
// slack, where the relaxed set is locally a linear scaling. The estimate is a
// lower bound on the sharp constant.
inline DistanceBound regret_to_distance_bound(const StageGame& game, double eps, PNorm p,
                                              EquilibriumKind kind = EquilibriumKind::kHannan,
                                              int random_directions = 64,
                                              std::uint64_t seed = 1) {
  if (!(eps >= 0.0)) throw ArgumentError("epsilon must be non-negative");
  DistanceBound out;
  out.cap = simplex_diameter(p);
  if (eps == 0.0) return out;
  const EquilibriumPolytope exact = build_polytope(game, kind, 0.0);
  const int n = exact.outcome_count;
  double scale = 0.0;
  for (const auto& row : exact.rows) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  std::vector<double> slacks{eps};
  if (scale > 0.0 && 1e-3 * scale < eps) slacks.push_back(1e-3 * scale);

  const CounterRng rng(seed, 0);
  std::vector<double> direction(n);
  for (double slack : slacks) {
    const EquilibriumPolytope relaxed = build_polytope(game, kind, slack);
    auto probe = [&](const std::vector<double>& point) {
      ++out.probes;
      const double ratio = distance(JointDistribution(point), exact, p).value / slack;
      if (ratio > out.empirical_constant) {
        out.empirical_constant = ratio;
        out.worst_point = point;
      }
    };
    for (int a = 0; a < n; ++a) {
      const auto mass = JointDistribution::point_mass(n, a);
      if (membership(mass, relaxed, 1e-12)) probe(mass.probabilities());
    }
    for (int r = 0; r < random_directions; ++r) {
      for (int a = 0; a < n; ++a) {
        const double u1 = 1.0 - rng.uniform(0, r, 2 * a);
        const double u2 = rng.uniform(0, r, 2 * a + 1);
        direction[a] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      }
      probe(linear_minimize(relaxed, direction));
    }
  }
  out.bound = std::min(out.empirical_constant * eps, out.cap);
  return out;
}

}  // namespace eqtrack

#endif  // EQTRACK_EQUILIBRIUM_HPP_
