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

#ifndef EQTRACK_IO_HPP_
#define EQTRACK_IO_HPP_

#include <cctype>
#include <cmath>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eqtrack/equilibrium.hpp"
#include "eqtrack/errors.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/oracles.hpp"
#include "eqtrack/welfare.hpp"

namespace eqtrack {

using json = nlohmann::json;

namespace io {

inline std::string child(const std::string& path, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return path + "/" + escaped;
}

inline std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path, "missing required key '" + key + "'");
  return *it;
}

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

inline void expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

inline long long as_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  throw ConfigError(path, "expected an integer");
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

template <typename T, typename F>
T optional_value(const json& j, const std::string& key, const std::string& path, T fallback,
                 F convert) {
  if (!j.is_object()) return fallback;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return convert(*it, child(path, key));
}

// Rejects keys outside `allowed` so typos surface as schema errors.
inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& path) {
  expect_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(child(path, it.key()), "unknown key");
  }
}

// 1-based line of the element a JSON pointer designates in `text`, or 0 when
// it cannot be found. A small scanner, independent of the parser, so that
// schema errors found after parsing still point into the source.
class PointerLocator {
 public:
  explicit PointerLocator(const std::string& text) : s_(text) {}

  int line_of(const std::string& pointer) {
    std::vector<std::string> tokens;
    if (!pointer.empty()) {
      std::size_t pos = 1;
      while (pos <= pointer.size()) {
        const std::size_t next = pointer.find('/', pos);
        std::string tok = pointer.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        std::string un;
        for (std::size_t i = 0; i < tok.size(); ++i) {
          if (tok[i] == '~' && i + 1 < tok.size()) {
            un += tok[i + 1] == '1' ? '/' : '~';
            ++i;
          } else {
            un += tok[i];
          }
        }
        tokens.push_back(un);
        if (next == std::string::npos) break;
        pos = next + 1;
      }
    }
    i_ = 0;
    line_ = 1;
    try {
      skip_ws();
      for (const std::string& tok : tokens) {
        if (!descend(tok)) return line_;
        skip_ws();
      }
      return line_;
    } catch (...) {
      return 0;
    }
  }

 private:
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void advance() {
    if (i_ >= s_.size()) throw 0;
    if (s_[i_] == '\n') ++line_;
    ++i_;
  }
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance();
  }
  std::string read_string() {
    advance();  // opening quote
    std::string out;
    while (peek() != '"') {
      if (peek() == '\\') {
        advance();
      }
      out += peek();
      advance();
    }
    advance();
    return out;
  }
  void skip_value() {
    skip_ws();
    const char c = peek();
    if (c == '"') {
      read_string();
    } else if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      advance();
      skip_ws();
      if (peek() == close) {
        advance();
        return;
      }
      while (true) {
        skip_ws();
        if (c == '{') {
          read_string();
          skip_ws();
          advance();  // ':'
        }
        skip_value();
        skip_ws();
        if (peek() == ',') {
          advance();
          continue;
        }
        advance();  // close
        return;
      }
    } else {
      while (i_ < s_.size() && !std::strchr(",]} \t\r\n", s_[i_])) advance();
    }
  }
  // Moves to the start of the member/element named by `tok`.
  bool descend(const std::string& tok) {
    const char c = peek();
    if (c == '{') {
      advance();
      while (true) {
        skip_ws();
        if (peek() == '}') return false;
        const int key_line = line_;
        const std::string key = read_string();
        skip_ws();
        advance();  // ':'
        skip_ws();
        if (key == tok) {
          (void)key_line;
          return true;
        }
        skip_value();
        skip_ws();
        if (peek() == ',') advance();
      }
    }
    if (c == '[') {
      std::size_t want = 0;
      try {
        want = std::stoul(tok);
      } catch (...) {
        return false;
      }
      advance();
      for (std::size_t idx = 0;; ++idx) {
        skip_ws();
        if (peek() == ']') return false;
        if (idx == want) return true;
        skip_value();
        skip_ws();
        if (peek() == ',') advance();
      }
    }
    return false;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
};

}  // namespace io

// ---------------------------------------------------------------- games

inline NoiseSpec noise_from_json(const json& j, const std::string& path) {
  io::check_keys(j, {"kind", "scale"}, path);
  NoiseSpec n;
  const std::string kind = io::as_string(io::require(j, "kind", path), io::child(path, "kind"));
  if (kind == "uniform") {
    n.kind = NoiseSpec::Kind::kUniform;
  } else if (kind == "gaussian") {
    n.kind = NoiseSpec::Kind::kGaussian;
  } else {
    throw ConfigError(io::child(path, "kind"), "noise kind must be 'uniform' or 'gaussian'");
  }
  n.scale = io::as_number(io::require(j, "scale", path), io::child(path, "scale"));
  if (n.scale < 0.0) throw ConfigError(io::child(path, "scale"), "noise scale must be non-negative");
  return n;
}

inline json to_json(const NoiseSpec& n) { return {{"kind", to_string(n.kind)}, {"scale", n.scale}}; }

inline StageGame stage_game_from_payoffs(const ActionSpace& space, double bound, const json& j,
                                         const std::string& path) {
  io::expect_array(j, path);
  if (static_cast<int>(j.size()) != space.num_players()) {
    throw ConfigError(path, "expected one payoff row per player (" +
                                std::to_string(space.num_players()) + ")");
  }
  std::vector<std::vector<double>> payoffs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = io::child(path, i);
    io::expect_array(j[i], row_path);
    if (static_cast<int>(j[i].size()) != space.outcome_count()) {
      throw ConfigError(row_path, "expected " + std::to_string(space.outcome_count()) +
                                      " payoffs in lexicographic outcome order");
    }
    std::vector<double> row;
    for (std::size_t a = 0; a < j[i].size(); ++a) {
      const double v = io::as_number(j[i][a], io::child(row_path, a));
      if (std::abs(v) > bound) {
        throw ConfigError(io::child(row_path, a), "payoff exceeds the bound M");
      }
      row.push_back(v);
    }
    payoffs.push_back(std::move(row));
  }
  try {
    return StageGame(space, std::move(payoffs), bound);
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
}

// A sequence whose segment lengths may be given as shares of the horizon.
struct SequenceSpec {
  struct Part {
    StageGame game;
    std::optional<int> length;
    std::optional<double> share;
    std::optional<NoiseSpec> noise;
  };
  std::vector<Part> parts;

  // Horizon implied by explicit lengths; nullopt when shares are used.
  std::optional<int> natural_horizon() const {
    if (parts.empty() || !parts.front().length) return std::nullopt;
    int total = 0;
    for (const Part& p : parts) total += *p.length;
    return total;
  }

  GameSequence materialize(int horizon) const {
    if (horizon < 1) throw ArgumentError("horizon must be positive");
    std::vector<Segment> segs;
    if (auto natural = natural_horizon()) {
      if (parts.size() == 1) {
        segs.push_back({parts[0].game, horizon, parts[0].noise});
        return GameSequence(std::move(segs));
      }
      if (*natural != horizon) {
        throw ArgumentError("segment lengths sum to " + std::to_string(*natural) +
                            " but the horizon is " + std::to_string(horizon) +
                            "; use shares to scale with T");
      }
      for (const Part& p : parts) segs.push_back({p.game, *p.length, p.noise});
      return GameSequence(std::move(segs));
    }
    double cumulative = 0.0;
    int previous_end = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      cumulative += *parts[k].share;
      const int end = k + 1 == parts.size()
                          ? horizon
                          : static_cast<int>(std::llround(cumulative * horizon));
      segs.push_back({parts[k].game, std::max(end - previous_end, 0), parts[k].noise});
      previous_end = std::max(end, previous_end);
    }
    return GameSequence(std::move(segs));
  }
};

// {players?, actions, M, payoffs | segments, noise?, injective?}
inline SequenceSpec sequence_spec_from_json(const json& j, const std::string& path = "") {
  io::check_keys(j, {"players", "actions", "M", "payoffs", "segments", "noise", "injective", "name"},
                 path);
  const json& actions_j = io::require(j, "actions", path);
  io::expect_array(actions_j, io::child(path, "actions"));
  std::vector<int> actions;
  for (std::size_t i = 0; i < actions_j.size(); ++i) {
    const long long k = io::as_integer(actions_j[i], io::child(io::child(path, "actions"), i));
    if (k < 2) throw ConfigError(io::child(io::child(path, "actions"), i), "each player needs at least two actions");
    actions.push_back(static_cast<int>(k));
  }
  if (actions.empty()) throw ConfigError(io::child(path, "actions"), "need at least one player");
  if (j.contains("players")) {
    const long long n = io::as_integer(j["players"], io::child(path, "players"));
    if (n != static_cast<long long>(actions.size())) {
      throw ConfigError(io::child(path, "players"), "does not match the length of 'actions'");
    }
  }
  const ActionSpace space(actions);
  const double bound = io::as_number(io::require(j, "M", path), io::child(path, "M"));
  if (!(bound > 0.0)) throw ConfigError(io::child(path, "M"), "M must be positive");
  std::optional<NoiseSpec> top_noise;
  if (j.contains("noise")) top_noise = noise_from_json(j["noise"], io::child(path, "noise"));

  std::vector<int> injective;
  if (j.contains("injective")) {
    const std::string ip = io::child(path, "injective");
    io::expect_array(j["injective"], ip);
    for (std::size_t i = 0; i < j["injective"].size(); ++i) {
      const long long p = io::as_integer(j["injective"][i], io::child(ip, i));
      if (p < 0 || p >= space.num_players()) throw ConfigError(io::child(ip, i), "player out of range");
      injective.push_back(static_cast<int>(p));
    }
  }
  auto finish = [&](StageGame g) {
    for (int p : injective) g = make_injective(g, p);
    return g;
  };

  SequenceSpec spec;
  const bool has_payoffs = j.contains("payoffs");
  const bool has_segments = j.contains("segments");
  if (has_payoffs == has_segments) {
    throw ConfigError(path, "give exactly one of 'payoffs' or 'segments'");
  }
  if (has_payoffs) {
    spec.parts.push_back({finish(stage_game_from_payoffs(space, bound, j["payoffs"],
                                                         io::child(path, "payoffs"))),
                          1, std::nullopt, top_noise});
    return spec;
  }
  const std::string sp = io::child(path, "segments");
  io::expect_array(j["segments"], sp);
  if (j["segments"].empty()) throw ConfigError(sp, "need at least one segment");
  double share_total = 0.0;
  for (std::size_t k = 0; k < j["segments"].size(); ++k) {
    const json& seg = j["segments"][k];
    const std::string kp = io::child(sp, k);
    io::check_keys(seg, {"length", "share", "payoffs", "noise"}, kp);
    SequenceSpec::Part part{finish(stage_game_from_payoffs(space, bound, io::require(seg, "payoffs", kp),
                                                           io::child(kp, "payoffs"))),
                            std::nullopt, std::nullopt, top_noise};
    if (seg.contains("noise")) part.noise = noise_from_json(seg["noise"], io::child(kp, "noise"));
    const bool has_len = seg.contains("length");
    const bool has_share = seg.contains("share");
    if (has_len == has_share) throw ConfigError(kp, "give exactly one of 'length' or 'share'");
    if (has_len) {
      const long long len = io::as_integer(seg["length"], io::child(kp, "length"));
      if (len < 1) throw ConfigError(io::child(kp, "length"), "length must be positive");
      part.length = static_cast<int>(len);
    } else {
      const double s = io::as_number(seg["share"], io::child(kp, "share"));
      if (!(s > 0.0 && s <= 1.0)) throw ConfigError(io::child(kp, "share"), "share must lie in (0, 1]");
      part.share = s;
      share_total += s;
    }
    if (k > 0 && part.length.has_value() != spec.parts.front().length.has_value()) {
      throw ConfigError(kp, "do not mix 'length' and 'share' segments");
    }
    spec.parts.push_back(std::move(part));
  }
  if (!spec.parts.front().length && std::abs(share_total - 1.0) > 1e-9) {
    throw ConfigError(sp, "segment shares must sum to 1");
  }
  return spec;
}

inline json payoffs_to_json(const StageGame& g) { return g.payoffs(); }

inline json to_json(const GameSequence& seq) {
  json j;
  j["players"] = seq.num_players();
  j["actions"] = seq.space().actions_per_player();
  j["M"] = seq.bound();
  json segs = json::array();
  for (const Segment& s : seq.segments()) {
    json seg{{"length", s.length}, {"payoffs", payoffs_to_json(s.game)}};
    if (s.noise) seg["noise"] = to_json(*s.noise);
    segs.push_back(std::move(seg));
  }
  j["segments"] = std::move(segs);
  return j;
}

inline json to_json(const StageGame& g) {
  return {{"players", g.num_players()},
          {"actions", g.space().actions_per_player()},
          {"M", g.bound()},
          {"payoffs", payoffs_to_json(g)}};
}

// ---------------------------------------------------------------- reports

inline json to_json(const DistanceReport& r) {
  return {{"value", r.value},
          {"p", to_string(r.p)},
          {"witness", r.witness},
          {"gap_certificate", r.gap_certificate},
          {"iterations", r.iterations}};
}

inline json to_json(const EquilibriumPolytope& p) {
  return {{"kind", to_string(p.kind)},
          {"epsilon", p.epsilon},
          {"outcomes", p.outcome_count},
          {"rows", p.rows}};
}

inline json to_json(const RegretReport& r) {
  json j{{"kind", to_string(r.kind)},
         {"benchmark", r.benchmark},
         {"realized", r.realized},
         {"regret", r.regret},
         {"switches", r.switches},
         {"budget", r.budget},
         {"exact", r.exact},
         {"method", r.method}};
  if (r.kind == RegretKind::kExternal) {
    j["comparator"] = r.comparator;
    j["switch_periods"] = r.switch_periods;
  } else {
    json blocks = json::array();
    for (const SwapBlock& b : r.swaps) {
      blocks.push_back({{"first", b.interval.first},
                        {"last", b.interval.last},
                        {"from", b.from},
                        {"to", b.to},
                        {"gain", b.gain}});
    }
    j["comparator"] = std::move(blocks);
  }
  return j;
}

struct WelfareReport {
  double opt_sw = 0.0;
  double worst_case = 0.0;
  double poa = 1.0;
  BetaReport beta;
  double lambda = 0.0;
  double mu = 0.0;
  double shift = 0.0;
};

inline json to_json(const WelfareReport& w) {
  return {{"opt_sw", w.opt_sw},
          {"worst_case", w.worst_case},
          {"poa", std::isinf(w.poa) ? json("inf") : json(w.poa)},
          {"beta", {{"value", w.beta.value}, {"exact", w.beta.exact}}},
          {"smoothness", {{"lambda", w.lambda}, {"mu", w.mu}}},
          {"payoff_shift", w.shift}};
}

}  // namespace eqtrack

#endif  // EQTRACK_IO_HPP_
