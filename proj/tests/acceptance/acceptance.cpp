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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eqtrack/eqtrack.hpp"
#include "support/brute_force.hpp"

namespace {

using namespace eqtrack;

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void check(const std::string& name, const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  detail.precision(6);
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  report(name, ok, detail.str());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int worker_count() {
  if (const char* env = std::getenv("EQTRACK_JOBS")) return std::max(1, std::atoi(env));
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ReplicationSummary> sweep(json doc) {
  ExperimentConfig cfg = experiment_from_json(doc);
  cfg.sim.jobs = worker_count();
  return convergence_sweep(cfg.sim);
}

double err_per_T(const ReplicationSummary& s) { return s.tracking_error / s.horizon; }

GainMatrix dyadic_gains(std::mt19937_64& gen, int T, int K) {
  std::uniform_int_distribution<int> pick(-8, 8);
  GainMatrix g(T, K);
  for (int t = 0; t < T; ++t)
    for (int x = 0; x < K; ++x) g(t, x) = pick(gen) / 8.0;
  return g;
}

bool oracle_equivalence(std::ostringstream& out) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2024);
  int mismatches = 0;
  long long comparisons = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int T = 1 + static_cast<int>(gen() % 8);
    const int K = 2 + static_cast<int>(gen() % 2);
    const long long C = static_cast<long long>(gen() % 4);
    const GainMatrix g = dyadic_gains(gen, T, K);
    std::vector<int> a(T);
    for (int& v : a) v = static_cast<int>(gen() % K);
    if (external_dynamic_benchmark(g, C).benchmark != brute::external_benchmark(g, C)) ++mismatches;
    if (internal_dynamic_benchmark(a, g, C).regret != brute::internal_benchmark(a, g, C)) ++mismatches;
    comparisons += 2;
  }
  const double elapsed = seconds_since(start);
  out << comparisons << " comparisons, " << mismatches << " mismatches, " << elapsed << " s";
  return mismatches == 0 && elapsed < 30.0;
}

bool appendix_b(std::ostringstream& out) {
  const StageGame g = fixtures::appendix_b_game(0.1);
  const JointDistribution q = JointDistribution::point_mass(4, 1);
  const double d = distance(q, build_polytope(g, EquilibriumKind::kHannan), PNorm::kTwo).value;
  const bool in_eps = membership(q, build_polytope(g, EquilibriumKind::kHannan, 0.1));
  const bool in_zero = membership(q, build_polytope(g, EquilibriumKind::kHannan, 0.0));
  out << "d2=" << std::setprecision(12) << d << " member(eps=0.1)=" << in_eps
      << " member(eps=0)=" << in_zero;
  return std::abs(d - std::sqrt(2.0)) <= 1e-7 && in_eps && !in_zero;
}

bool appendix_e(std::ostringstream& out) {
  const auto poly = build_polytope(fixtures::appendix_e_gamma2(0.1), EquilibriumKind::kHannan);
  bool ok = true;
  for (double alpha : {0.0, 0.5, 1.0}) {
    const JointDistribution q(std::vector<double>{alpha, 1.0 - alpha, 0.0, 0.0});
    ok = ok && membership(q, poly);
  }
  const bool bc = membership(JointDistribution::point_mass(4, 2), poly);
  const bool bd = membership(JointDistribution::point_mass(4, 3), poly);
  const DistanceReport r = distance(JointDistribution::point_mass(4, 3), poly, PNorm::kTwo);
  const double lower = r.value - std::sqrt(std::max(r.gap_certificate, 0.0));
  out << "mixtures member=" << ok << " bc=" << bc << " bd=" << bd << " d2(bd)=" << r.value
      << " gap=" << r.gap_certificate;
  return ok && !bc && !bd && lower > 1.0;
}

bool example1_dominance(std::ostringstream& out) {
  const auto early = single_best_reply(fixtures::example1_game(fixtures::kExample1BetaEarly));
  const auto late = single_best_reply(fixtures::example1_game(fixtures::kExample1BetaLate));
  bool ok = true;
  for (int i = 0; i < 2; ++i) {
    ok = ok && early[i] == fixtures::kPriceHigh && late[i] == fixtures::kPriceLow;
    ok = ok && is_strictly_dominant(fixtures::example1_game(fixtures::kExample1BetaEarly), i, fixtures::kPriceHigh);
    ok = ok && is_strictly_dominant(fixtures::example1_game(fixtures::kExample1BetaLate), i, fixtures::kPriceLow);
  }
  out << "first half (p_h,p_h), second half (p_l,p_l): " << (ok ? "yes" : "no");
  return ok;
}

json figure_doc(const std::string& preset) {
  json doc = preset_document(preset);
  doc.erase("T");
  doc["grid"] = {1000, 10000, 100000};
  doc["replications"] = 200;
  doc["seed"] = 7;
  return doc;
}

void figures() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<ReplicationSummary> s, e;
  try {
    s = sweep(figure_doc("example1-exp3s"));
    e = sweep(figure_doc("example1-exp3"));
  } catch (const std::exception& ex) {
    report("fig_exp3s_convergence", false, ex.what());
    report("fig_exp3_nonconvergence", false, ex.what());
    return;
  }
  const double elapsed = seconds_since(start);
  {
    std::ostringstream out;
    out.precision(4);
    bool ok = true;
    for (int k = 0; k < 2; ++k) {
      const double lo = s.front().batches[k].distance.value;
      const double hi = s.back().batches[k].distance.value;
      out << "batch" << k + 1 << " d(1e3)=" << lo << " d(1e5)=" << hi << "; ";
      ok = ok && hi < 0.5 * lo;
    }
    out << "err/T=";
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << (i ? "," : "") << err_per_T(s[i]);
      if (i > 0) ok = ok && err_per_T(s[i]) < err_per_T(s[i - 1]);
    }
    out << "; " << elapsed << " s for both sweeps";
    report("fig_exp3s_convergence", ok, out.str());
  }
  {
    std::ostringstream out;
    out.precision(4);
    const double lo = e.front().batches[1].distance.value;
    const double hi = e.back().batches[1].distance.value;
    bool ok = hi > 0.7 * lo;
    out << "batch2 d(1e3)=" << lo << " d(1e5)=" << hi << "; err/T=";
    for (std::size_t i = 0; i < e.size(); ++i) {
      out << (i ? "," : "") << err_per_T(e[i]);
      ok = ok && err_per_T(e[i]) >= 0.05;
    }
    report("fig_exp3_nonconvergence", ok, out.str());
  }
}

bool appendix_b3(std::ostringstream& out) {
  json doc = preset_document("appendixB3");
  doc["seed"] = 7;
  const auto rows = sweep(doc);
  const double first = err_per_T(rows.front());
  const double last = err_per_T(rows.back());
  out << "err/T(1e3)=" << first << " err/T(1e5)=" << last;
  return last >= 0.5 * first;
}

json chicken_target() {
  return json::array({{{"outcome", {0, 0}}, {"mass", 2}},
                      {{"outcome", {0, 1}}, {"mass", 1}},
                      {{"outcome", {1, 0}}, {"mass", 1}}});
}

bool trigger_exactness(std::ostringstream& out) {
  const int m = 4;
  const int T = 600 * m;
  const std::vector<double> q{0.5, 0.25, 0.25, 0.0};
  json doc = preset_document("trigger-demo");
  doc["T"] = T;
  doc["replications"] = 10;
  doc["seed"] = 7;
  const ReplicationSummary s = sweep(doc).front();
  double l1 = 0.0;
  for (int a = 0; a < 4; ++a) l1 += std::abs(s.batches[0].mean_distribution[a] - q[a]);
  out << "|avg-q|_1=" << l1 << " tracking=" << s.tracking_error;
  bool ok = l1 == 0.0 && s.tracking_error == 0.0;

  // Column player defects once at t = 101.
  const GameSequence seq = GameSequence::constant(fixtures::chicken(), T);
  const json spec{{"kind", "trigger"}, {"params", {{"target", chicken_target()}}}};
  std::vector<LearnerPtr> learners;
  learners.push_back(make_learner(spec, {&seq, 0, T}, "/learners/0"));
  learners.push_back(std::make_unique<ScriptedPolicy>(2, [](long long t) {
    static const int column[] = {0, 0, 1, 0};
    const int a = column[(t - 1) % 4];
    return t == 101 ? 1 - a : a;
  }));
  const auto& trigger = static_cast<const TriggerPolicy&>(*learners[0]);
  LearnerPtr replay = trigger.fallback().clone();
  const std::uint64_t seed = 7;
  const RunTrace trace = play_episode(seq, learners, seed, 0);
  const long long d = trigger.detection_period().value_or(-1);
  replay->reset();
  const CounterRng rng(seed, 0);
  int mismatched = 0;
  for (int t = static_cast<int>(d) + 1; d > 0 && t <= T; ++t) {
    const auto p = replay->act(t - d);
    const int a = sample_index(p, rng.uniform(0, t));
    if (a != seq.space().action_of(trace.outcome(t), 0)) ++mismatched;
    replay->observe(t - d, a, trace.payoff(t, 0));
  }
  out << "; detection at " << d << ", " << mismatched << " post-detection mismatches";
  return ok && d == 101 && mismatched == 0;
}

bool restart_consistency(std::ostringstream& out) {
  const json doc{
      {"name", "restart-consistency"},
      {"sequence", {{"builtin", "matching_pennies"}}},
      {"learners",
       json::array({{{"kind", "restart"},
                     {"params", {{"inner", {{"kind", "exp3"}}}, {"budget", {{"kind", "power"}, {"exponent", 0.3}}}}}},
                    {{"kind", "scripted"},
                     {"params", {{"schedule", "periodic"}, {"actions", {0, 1}},
                                 {"block", {{"kind", "power"}, {"exponent", 0.75}}}}}}})},
      {"grid", {1024, 8192, 65536}},
      {"replications", 20},
      {"seed", 3},
      {"metrics", {{"external_budget", {{"kind", "power"}, {"exponent", 0.3}}},
                   {"per_replication_distances", false}}}};
  const auto rows = sweep(doc);
  bool ok = true;
  out << "DB(C_T) regret/T=";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double r = rows[i].external_regret[0].mean / rows[i].horizon;
    out << (i ? "," : "") << r << " (C_T=" << rows[i].external_budget << ")";
    if (i > 0) ok = ok && r < rows[i - 1].external_regret[0].mean / rows[i - 1].horizon;
  }
  return ok;
}

bool regret_matching_ce(std::ostringstream& out) {
  const json learner{{"kind", "restart"}, {"params", {{"inner", {{"kind", "regret_matching"}}}, {"budget", 1}}}};
  const json doc{{"name", "regret-matching-ce"},
                 {"sequence", {{"builtin", "pennies_then_chicken"}}},
                 {"learners", json::array({learner, learner})},
                 {"grid", {1000, 100000}},
                 {"replications", 50},
                 {"seed", 11},
                 {"metrics", {{"equilibrium", "ce"}, {"p", "2"}, {"external_budget", 1}}}};
  const auto rows = sweep(doc);
  bool ok = true;
  for (int k = 0; k < 2; ++k) {
    const double lo = rows.front().batches[k].distance.value;
    const double hi = rows.back().batches[k].distance.value;
    out << "batch" << k + 1 << " d(1e3)=" << lo << " d(1e5)=" << hi << "; ";
    ok = ok && hi < 0.5 * lo;
  }
  return ok;
}

bool rexp3p_schedule(std::ostringstream& out) {
  struct Row {
    long long C;
    double c, eta, gamma, beta;
  };
  // K = 2, C_T = ceil(T^0.3), evaluated at the end of each pull.
  const Row expected[] = {
      {0, 1.3862943611198906, 0.16651092223153954, 0.5, 2.497663833473093},
      {1, 3.8712010109078907, 0.19675367876885785, 0.5, 2.951305181532868},
      {3, 7.624618986159398, 0.19525136345438665, 0.5, 2.9287704518157995},
      {4, 11.325920960271892, 0.16827002823045978, 0.5, 2.5240504234568966},
      {4, 14.098509682511674, 0.13275216421263947, 0.5, 1.991282463189592},
      {5, 19.626581659088295, 0.11075474498607357, 0.5, 1.6613211747911034},
  };
  const BudgetFunction budget = BudgetSpec::power(0.3).function();
  double worst = 0.0;
  bool budgets = true;
  for (int r = 1; r <= 6; ++r) {
    const Rexp3PPull p = rexp3p_pull_parameters(r, 2, budget);
    const Row& e = expected[r - 1];
    budgets = budgets && p.budget == e.C;
    worst = std::max({worst, std::abs(p.c - e.c), std::abs(p.eta - e.eta), std::abs(p.gamma - e.gamma),
                      std::abs(p.beta - e.beta)});
  }
  out << "budgets match=" << budgets << " max abs diff=" << worst;
  return budgets && worst <= 1e-12;
}

bool welfare_bound(std::ostringstream& out) {
  const int T = 10000;
  json doc = preset_document("smooth-welfare-demo");
  doc["T"] = T;
  doc["replications"] = 50;
  doc["seed"] = 7;
  const ReplicationSummary s = sweep(doc).front();
  const GameSequence seq = fixtures::example1_sequence(T);
  const WelfareFunction w = WelfareFunction::additive();
  const double opt = optimal_welfare(seq, w);
  const double b = beta(seq, w, 1).value;
  double g = 0.0;
  for (const Estimate& e : s.external_regret) g = std::max(g, e.mean);
  bool ok = true;
  for (double mu : {0.0, 0.5, 1.0}) {
    double lambda = std::numeric_limits<double>::infinity();
    for (const Segment& seg : seq.segments()) lambda = std::min(lambda, best_lambda(seg.game, w, mu));
    const double bound = welfare_lower_bound(lambda, mu, b, opt, 2, g);
    out << "mu=" << mu << " lambda=" << lambda << " bound=" << bound << "; ";
    ok = ok && s.welfare.mean + 3.0 * s.welfare.se >= bound;
  }
  out << "welfare=" << s.welfare.mean << " (se " << s.welfare.se << ") g_T=" << g << " beta(1)=" << b;
  return ok;
}

bool beta_properties(std::ostringstream& out) {
  const WelfareFunction w = WelfareFunction::additive();
  bool full = true;
  for (int T : {10, 100, 10000}) {
    const GameSequence seq = fixtures::example1_sequence(T);
    full = full && beta(seq, w, 1).value == 1.0 && beta(seq, w, 3).value == 1.0;
  }
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> pick(0, 4);
  int mismatches = 0, non_monotone = 0, instances = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Segment> segs;
    const int parts = 1 + static_cast<int>(gen() % 3);
    for (int s = 0; s < parts; ++s) {
      std::vector<double> u0(4), u1(4);
      for (double& v : u0) v = pick(gen) / 4.0;
      for (double& v : u1) v = pick(gen) / 4.0;
      segs.push_back({StageGame(ActionSpace({2, 2}), {u0, u1}, 1.0), 1 + static_cast<int>(gen() % 2), {}});
    }
    const GameSequence seq(segs);
    ++instances;
    double previous = 0.0;
    const int V = static_cast<int>(seq.segments().size()) - 1;
    for (int C = 0; C <= 3; ++C) {
      const double v = beta(seq, w, C).value;
      if (std::abs(v - brute::beta(seq, w, C)) > 1e-12) ++mismatches;
      if (v < previous - 1e-12) ++non_monotone;
      if (C >= V && v != 1.0) full = false;
      previous = v;
    }
  }
  out << "beta=1 for C>=V: " << full << "; " << instances << " instances, " << mismatches
      << " brute-force mismatches, " << non_monotone << " monotonicity violations";
  return full && mismatches == 0 && non_monotone == 0;
}

bool lp_certification(std::ostringstream& out) {
  std::vector<StageGame> games{fixtures::appendix_b_game(0.1),
                               fixtures::appendix_e_gamma1(0.1),
                               fixtures::appendix_e_gamma2(0.1),
                               fixtures::example1_game(fixtures::kExample1BetaEarly),
                               fixtures::example1_game(fixtures::kExample1BetaLate),
                               fixtures::matching_pennies(),
                               fixtures::chicken(),
                               fixtures::coordination(),
                               StageGame(ActionSpace({2, 2}), {{3, 0, 5, 1}, {3, 5, 0, 1}}, 5.0)};
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  int checks = 0;
  double worst = 0.0;
  for (const StageGame& g : games) {
    for (auto kind : {EquilibriumKind::kHannan, EquilibriumKind::kCorrelated}) {
      for (double eps : {0.0, 0.05}) {
        const auto poly = build_polytope(g, kind, eps);
        for (int trial = 0; trial < 25; ++trial) {
          std::vector<double> c(4);
          for (double& v : c) v = normal(gen);
          double value = 0.0;
          linear_minimize(poly, c, &value);
          const auto vertex = brute::polytope_vertex_minimum(poly, c);
          if (!vertex) return false;
          worst = std::max(worst, std::abs(value - vertex->value));
          ++checks;
        }
      }
    }
  }
  out << checks << " LP solves vs vertex enumeration, max diff " << worst;
  return worst <= 1e-9;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  check("oracle_equivalence", oracle_equivalence);
  check("appendix_b_distance", appendix_b);
  check("appendix_e_membership", appendix_e);
  check("example1_dominance", example1_dominance);
  figures();
  check("appendix_b3_linear_error", appendix_b3);
  check("trigger_exactness", trigger_exactness);
  check("restart_consistency", restart_consistency);
  check("regret_matching_ce_tracking", regret_matching_ce);
  check("rexp3p_schedule", rexp3p_schedule);
  check("welfare_bound", welfare_bound);
  check("welfare_beta", beta_properties);
  check("solver_lp_vertices", lp_certification);
  check("solver_fw_gap", [](std::ostringstream& out) {
    const auto& audit = DistanceAudit::instance();
    out << "max gap " << audit.max_gap() << " over " << audit.calls() << " distance calls";
    return audit.calls() > 0 && audit.max_gap() <= 1e-8;
  });
  std::printf("%d failure(s), %.1f s\n", g_failures, seconds_since(start));
  return g_failures == 0 ? 0 : 1;
}
