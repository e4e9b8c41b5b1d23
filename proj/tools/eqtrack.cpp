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

// eqtrack command-line front end: run presets or config files, analyze games.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eqtrack/eqtrack.hpp"

namespace fs = std::filesystem;
using eqtrack::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitSchema = 2;

// Schema failure already formatted as "source:line: pointer: message".
struct SchemaFailure {
  std::string message;
};

struct Source {
  std::string label;       // file name or "preset <name>"
  std::string text;        // empty for presets
  std::string pointer_prefix;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SchemaFailure locate(const Source& src, const std::string& pointer, const std::string& msg) {
  const std::string full = src.pointer_prefix + pointer;
  std::string where = src.label;
  if (!src.text.empty()) {
    eqtrack::io::PointerLocator locator(src.text);
    int line = locator.line_of(full);
    if (line == 0) line = 1;
    where += ":" + std::to_string(line);
  }
  return {where + ": " + (full.empty() ? "/" : full) + ": " + msg};
}

json parse_source(Source& src) {
  try {
    return json::parse(src.text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, src.text.size());
    const int line = 1 + static_cast<int>(std::count(src.text.begin(), src.text.begin() + static_cast<long>(upto), '\n'));
    throw SchemaFailure{src.label + ":" + std::to_string(line) + ": invalid JSON: " + e.what()};
  }
}

// Parses "1e3,1e4,100000" into integer horizons.
std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1.0 || v > 1e8 || v != std::floor(v)) {
      throw CLI::ValidationError("--grid", "bad horizon '" + item + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return out;
}

std::string timestamp_tag() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct RunOptions {
  std::string target;
  std::string config_file;
  std::string T;
  std::string grid;
  int reps = 0;
  long long seed = -1;
  int jobs = 0;
  std::string p_norm;
  std::string eq;
  std::string out = "results";
  std::string tag;
  bool quiet = false;
};

int run_command(const RunOptions& opt) {
  Source src;
  json doc;
  if (!opt.config_file.empty() || (opt.target.size() > 5 && opt.target.ends_with(".json"))) {
    const std::string path = opt.config_file.empty() ? opt.target : opt.config_file;
    src.label = path;
    src.text = read_file(path);
    doc = parse_source(src);
    // A manifest carries the experiment under "config".
    if (doc.is_object() && doc.value("tool", "") == "eqtrack" && doc.contains("config")) {
      doc = doc["config"];
      src.pointer_prefix = "/config";
    }
  } else if (!opt.target.empty()) {
    src.label = "preset " + opt.target;
    try {
      doc = eqtrack::preset_document(opt.target);
    } catch (const eqtrack::ArgumentError& e) {
      throw SchemaFailure{e.what()};
    }
  } else {
    throw SchemaFailure{"run needs a preset name or --config FILE"};
  }
  if (!doc.is_object()) throw locate(src, "", "expected an object");

  if (!opt.grid.empty()) {
    doc.erase("T");
    doc["grid"] = parse_grid(opt.grid);
  } else if (!opt.T.empty()) {
    doc.erase("grid");
    doc["T"] = parse_grid(opt.T).front();
  }
  if (opt.reps > 0) doc["replications"] = opt.reps;
  if (opt.seed >= 0) doc["seed"] = opt.seed;
  if (!opt.p_norm.empty()) doc["metrics"]["p"] = opt.p_norm;
  if (!opt.eq.empty()) doc["metrics"]["equilibrium"] = opt.eq;
  const int file_jobs = doc.contains("jobs") && doc["jobs"].is_number_integer() ? doc["jobs"].get<int>() : 0;
  doc.erase("jobs");

  eqtrack::ExperimentConfig cfg;
  try {
    cfg = eqtrack::experiment_from_json(doc);
  } catch (const eqtrack::ConfigError& e) {
    throw locate(src, e.path(), e.message());
  }
  int jobs = opt.jobs;
  if (jobs <= 0) {
    if (const char* env = std::getenv("EQTRACK_JOBS")) jobs = std::atoi(env);
  }
  if (jobs <= 0) jobs = file_jobs > 0 ? file_jobs : 1;
  cfg.sim.jobs = jobs;

  const std::string tag = opt.tag.empty() ? timestamp_tag() : opt.tag;
  const fs::path dir = fs::path(opt.out) / cfg.name / tag;
  fs::create_directories(dir);

  const auto started = std::chrono::steady_clock::now();
  std::vector<eqtrack::ReplicationSummary> rows;
  try {
    rows = eqtrack::convergence_sweep(cfg.sim);
  } catch (const eqtrack::ConfigError& e) {
    throw locate(src, e.path(), e.message());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  {
    std::ofstream csv(dir / "summary.csv");
    eqtrack::write_summary_csv(csv, rows);
  }
  {
    std::ofstream seeds(dir / "seeds.csv");
    seeds << "T,replication,seed\n";
    for (const auto& r : rows) {
      for (int rep = 0; rep < r.replications; ++rep) seeds << r.horizon << ',' << rep << ',' << r.seed << '\n';
    }
  }
  {
    json summaries = json::array();
    for (const auto& r : rows) summaries.push_back(eqtrack::summary_to_json(r));
    std::ofstream out(dir / "summary.json");
    out << summaries.dump(2) << '\n';
  }
  {
    json manifest = eqtrack::make_manifest(cfg);
    manifest["jobs"] = jobs;
    manifest["wall_seconds"] = seconds;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  if (!opt.quiet) {
    for (const auto& r : rows) {
      std::printf("T=%d reps=%d err/T=%.6f (se %.6f)", r.horizon, r.replications,
                  r.tracking_error / r.horizon, r.tracking_per_replication.se / r.horizon);
      for (std::size_t i = 0; i < r.external_regret.size(); ++i) {
        std::printf(" reg%zu/T=%.6f", i, r.external_regret[i].mean / r.horizon);
      }
      std::printf("\n");
    }
    std::printf("wrote %s (%.1fs)\n", dir.string().c_str(), seconds);
  }
  return 0;
}

struct AnalyzeOptions {
  std::string game;
  std::vector<std::string> q;
  std::string eq = "hannan";
  std::string p_norm = "2";
  double eps = 0.0;
  std::string welfare = "additive";
};

int analyze_command(const AnalyzeOptions& opt) {
  Source src;
  std::vector<eqtrack::StageGame> games;
  if (opt.game.starts_with("builtin:")) {
    try {
      games.push_back(eqtrack::builtin_game(opt.game.substr(8)));
    } catch (const eqtrack::ArgumentError& e) {
      throw SchemaFailure{e.what()};
    }
  } else {
    src.label = opt.game;
    src.text = read_file(opt.game);
    const json doc = parse_source(src);
    try {
      const eqtrack::SequenceSpec spec = eqtrack::sequence_spec_from_json(doc);
      for (const auto& part : spec.parts) games.push_back(part.game);
    } catch (const eqtrack::ConfigError& e) {
      throw locate(src, e.path(), e.message());
    }
  }
  eqtrack::EquilibriumKind kind;
  eqtrack::PNorm p;
  eqtrack::WelfareFunction w;
  try {
    kind = eqtrack::parse_equilibrium_kind(opt.eq);
    p = eqtrack::parse_p_norm(opt.p_norm);
    w = eqtrack::parse_welfare(opt.welfare);
  } catch (const eqtrack::ArgumentError& e) {
    throw SchemaFailure{e.what()};
  }
  if (opt.eps < 0.0) throw SchemaFailure{"--eps must be non-negative"};

  json report = json::array();
  for (std::size_t g = 0; g < games.size(); ++g) {
    const eqtrack::StageGame& game = games[g];
    const eqtrack::EquilibriumPolytope poly = eqtrack::build_polytope(game, kind, opt.eps);
    json entry{{"segment", g},
               {"polytope", {{"kind", eqtrack::to_string(kind)},
                             {"epsilon", opt.eps},
                             {"outcomes", poly.outcome_count},
                             {"constraints", poly.rows.size()}}}};
    json queries = json::array();
    for (const std::string& text : opt.q) {
      std::vector<double> values;
      try {
        values = parse_vector(text);
      } catch (const std::exception&) {
        throw SchemaFailure{"--q: cannot parse '" + text + "'"};
      }
      if (static_cast<int>(values.size()) != poly.outcome_count) {
        throw SchemaFailure{"--q: expected " + std::to_string(poly.outcome_count) + " entries"};
      }
      eqtrack::JointDistribution q;
      try {
        q = eqtrack::JointDistribution(values);
      } catch (const eqtrack::ArgumentError& e) {
        throw SchemaFailure{std::string("--q: ") + e.what()};
      }
      const eqtrack::DistanceReport d = eqtrack::distance(q, poly, p);
      queries.push_back({{"q", values},
                         {"member", eqtrack::membership(q, poly)},
                         {"max_violation", eqtrack::max_violation(q, poly)},
                         {"distance", eqtrack::to_json(d)}});
    }
    entry["queries"] = queries;
    const eqtrack::PoaReport pr = eqtrack::poa(game, w, kind);
    entry["welfare"] = {{"optimum", pr.optimum},
                        {"worst_equilibrium", pr.worst_case},
                        {"poa", std::isinf(pr.value) ? json("inf") : json(pr.value)},
                        {"payoff_shift", pr.shift}};
    json frontier = json::array();
    for (double mu : {0.0, 0.25, 0.5, 1.0, 2.0}) {
      const double lambda = eqtrack::best_lambda(game, w, mu);
      frontier.push_back({{"mu", mu}, {"lambda", std::isinf(lambda) ? json("inf") : json(lambda)}});
    }
    entry["smoothness_frontier"] = frontier;
    report.push_back(entry);
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eqtrack: equilibrium tracking in time-varying repeated games"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a preset or an experiment config");
  run_cmd->add_option("target", run.target, "Preset name or config JSON file");
  run_cmd->add_option("--config", run.config_file, "Experiment config or manifest JSON");
  run_cmd->add_option("--T", run.T, "Single horizon (accepts 1e4)");
  run_cmd->add_option("--grid", run.grid, "Comma-separated horizons, e.g. 1e3,1e4,1e5");
  run_cmd->add_option("--reps", run.reps, "Replications")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Base seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--jobs", run.jobs, "Worker threads (default: EQTRACK_JOBS or 1)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--p-norm", run.p_norm, "Distance norm")->check(CLI::IsMember({"1", "2", "inf"}));
  run_cmd->add_option("--eq", run.eq, "Equilibrium notion")->check(CLI::IsMember({"hannan", "ce"}));
  run_cmd->add_option("--out", run.out, "Output root directory");
  run_cmd->add_option("--tag", run.tag, "Run directory name (default: UTC timestamp)");
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  AnalyzeOptions analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Polytope, distance and welfare report for a game");
  analyze_cmd->add_option("game", analyze.game, "Game JSON file or builtin:<name>")->required();
  analyze_cmd->add_option("--q", analyze.q, "Joint distribution, comma separated (repeatable)");
  analyze_cmd->add_option("--eq", analyze.eq, "hannan or ce");
  analyze_cmd->add_option("--p-norm", analyze.p_norm, "1, 2 or inf");
  analyze_cmd->add_option("--eps", analyze.eps, "Polytope slack");
  analyze_cmd->add_option("--welfare", analyze.welfare, "additive or minimum");

  CLI::App* list_cmd = app.add_subcommand("list-presets", "Print preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  try {
    if (*list_cmd) {
      for (const std::string& name : eqtrack::preset_names()) std::cout << name << '\n';
      return 0;
    }
    if (*run_cmd) return run_command(run);
    if (*analyze_cmd) return analyze_command(analyze);
  } catch (const SchemaFailure& e) {
    std::cerr << e.message << '\n';
    return kExitSchema;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
