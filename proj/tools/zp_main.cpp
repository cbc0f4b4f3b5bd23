/* Copyright 2026 The ZeroProver Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zp/loop.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace zp;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Written before any work starts, finalized with an end timestamp after.
class Manifest {
 public:
  Manifest(const std::string& dir, const std::string& command,
           ojson config, uint64_t seed, std::vector<std::string> outputs)
      : path_(fs::path(dir) / "manifest.json") {
    j_["command"] = command;
    j_["version"] = kVersion;
    j_["seed"] = seed;
    j_["config"] = std::move(config);
    j_["outputs"] = std::move(outputs);
    j_["started"] = timestamp_utc();
    j_["finished"] = nullptr;
    write();
  }

  void finish() {
    j_["finished"] = timestamp_utc();
    write();
  }

 private:
  void write() const {
    fs::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw IoError("cannot write " + path_.string());
    out << j_.dump(2) << "\n";
  }

  fs::path path_;
  ojson j_;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string db_path_from_manifest(const std::string& state_dir) {
  const fs::path mpath = fs::path(state_dir) / "manifest.json";
  if (!fs::exists(mpath)) {
    throw ConfigError("no manifest in " + state_dir +
                      "; run seed-run or loop there first");
  }
  try {
    const ojson j = ojson::parse(slurp(mpath));
    return j.at("config").at("db").get<std::string>();
  } catch (const std::exception&) {
    throw ConfigError("manifest in " + state_dir +
                      " does not record a database path");
  }
}

TheoremDatabase load_db_or_fail(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("database not found: " + path);
  return TheoremDatabase::load(path);
}

std::string run_label(const std::string& dir) {
  std::string d = dir;
  while (d.size() > 1 && d.back() == '/') d.pop_back();
  const std::string name = fs::path(d).filename().string();
  return name.empty() ? d : name;
}

struct GenArgs {
  int size = 1000;
  uint64_t seed = 0;
  std::string out;
  double val_fraction = 0.2;
};

void run_gen_corpus(const GenArgs& a) {
  CorpusConfig c;
  c.n_theorems = a.size;
  c.rng_seed = a.seed;
  c.val_fraction = a.val_fraction;
  TheoremDatabase db = generate_corpus(c, nullptr);
  db.save(a.out);
  std::cout << "wrote " << db.size() << " theorems (train "
            << db.indices_of(Split::Train).size() << ", val "
            << db.indices_of(Split::Val).size() << ") to " << a.out << "\n";
}

struct SeedArgs {
  std::string db, variant, state;
  uint64_t seed = 0;
};

void run_seed_cmd(const SeedArgs& a) {
  const std::optional<SeedVariant> variant = seed_variant_from_name(a.variant);
  if (!variant) {
    throw ConfigError("unknown variant '" + a.variant +
                      "' (expected random-policy or shared-tower)");
  }
  if (state_is_seeded(a.state)) {
    throw ConfigError("state already seeded: " + a.state);
  }
  TheoremDatabase db = load_db_or_fail(a.db);
  LoopConfig cfg;
  cfg.seed = a.seed;
  cfg.workers = default_workers();
  ojson config;
  config["db"] = a.db;
  config["state"] = a.state;
  config["variant"] = a.variant;
  Manifest manifest(a.state, "seed-run", config, a.seed, {a.state});
  LoopState state;
  const SeedOutcome out = run_seed(db, *variant, cfg, a.state, state);
  manifest.finish();
  std::cout << "seeded " << a.state << ": proved " << out.proved << "/"
            << out.attempted << "\n";
}

struct LoopArgs {
  std::string db, state, strategy = "bow2";
  bool extra_negatives = false;
  int rounds = 30;
  int goals_per_round = 200;
  uint64_t seed = 0;
  int workers = default_workers();
  bool resume = false;
};

void run_loop_cmd(const LoopArgs& a) {
  LoopConfig cfg;
  cfg.strategy = strategy_from_name(a.strategy);
  cfg.rounds = a.rounds;
  cfg.goals_per_round = a.goals_per_round;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.extra_negatives = a.extra_negatives;
  TheoremDatabase db = load_db_or_fail(a.db);

  ojson config;
  config["db"] = a.db;
  config["state"] = a.state;
  config["strategy"] = a.strategy;
  config["extra_negatives"] = a.extra_negatives;
  config["rounds"] = a.rounds;
  config["goals_per_round"] = a.goals_per_round;
  config["workers"] = a.workers;
  config["resume"] = a.resume;
  Manifest manifest(a.state, "loop", config, a.seed, {a.state});

  if (!state_is_seeded(a.state)) {
    const SeedVariant variant = cfg.strategy == Strategy::Baseline
                                    ? SeedVariant::RandomPolicy
                                    : SeedVariant::SharedTowerCosine;
    LoopState seeded;
    const SeedOutcome out = run_seed(db, variant, cfg, a.state, seeded);
    std::cout << "seeded " << a.state << " (" << seed_variant_name(variant)
              << "): proved " << out.proved << "/" << out.attempted << "\n";
  } else if (!a.resume && fs::exists(fs::path(a.state) / "round_0")) {
    throw ConfigError("state already contains rounds; pass --resume: " +
                      a.state);
  }

  LoopState state = load_state(db, cfg, a.state);
  while (state.next_round < cfg.rounds) {
    run_round(db, cfg, a.state, state);
    const StatsRow& row = state.stats.back();
    std::cout << "round " << row.round << ": proved " << row.proved << "/"
              << row.attempted << ", cumulative " << row.cumulative_proved
              << "\n";
  }
  manifest.finish();
  if (!state.stats.empty()) {
    const StatsRow& row = state.stats.back();
    std::cout << "done: cumulative " << row.cumulative_proved << " ("
              << row.cumulative_pct << "%) after round " << row.round << "\n";
  }
}

struct ReseedArgs {
  std::string from, state;
  uint64_t seed = 0;
};

void run_reseed_cmd(const ReseedArgs& a) {
  if (!state_is_seeded(a.from)) {
    throw ConfigError("source state has no seed run: " + a.from);
  }
  const std::string db_path = db_path_from_manifest(a.from);
  TheoremDatabase db = load_db_or_fail(db_path);
  LoopConfig cfg;
  cfg.seed = a.seed;
  cfg.workers = default_workers();
  ojson config;
  config["db"] = db_path;
  config["from"] = a.from;
  config["state"] = a.state;
  Manifest manifest(a.state, "reseed", config, a.seed, {a.state});
  const LoopState state = run_reseed(db, cfg, a.from, a.state);
  manifest.finish();
  std::cout << "reseeded " << a.state << " from " << a.from << " with "
            << state.store.historical.size() << " inherited examples\n";
}

struct EvalArgs {
  std::string state, split;
  int round = 0;
};

void run_eval_cmd(const EvalArgs& a) {
  Split split;
  if (a.split == "train") {
    split = Split::Train;
  } else if (a.split == "val") {
    split = Split::Val;
  } else {
    throw ConfigError("unknown split '" + a.split +
                      "' (expected train or val)");
  }
  const std::string db_path = db_path_from_manifest(a.state);
  TheoremDatabase db = load_db_or_fail(db_path);
  const fs::path ckpt_path = fs::path(a.state) /
                             ("round_" + std::to_string(a.round)) /
                             "checkpoint";
  if (!fs::exists(ckpt_path)) {
    throw ConfigError("no checkpoint for round " + std::to_string(a.round) +
                      " in " + a.state);
  }
  const TokenStats stats = compute_token_stats(db);
  const RankingCheckpoint ckpt =
      load_checkpoint(ckpt_path.string(), vocab_fingerprint(stats.vocab));
  const EvalReport rep =
      evaluate(db, ckpt, split, SearchLimits{}, default_workers());
  char pct[32];
  std::snprintf(pct, sizeof(pct), "%.4f",
                rep.attempted > 0 ? 100.0 * rep.proved / rep.attempted : 0.0);
  std::cout << "eval round=" << a.round << " split=" << a.split
            << " attempted=" << rep.attempted << " proved=" << rep.proved
            << " pct=" << pct << "\n";
}

struct StatsArgs {
  std::vector<std::string> runs;
  std::string out;
};

void run_stats_cmd(const StatsArgs& a) {
  std::vector<std::pair<std::string, std::string>> runs;  // label, dir
  for (const std::string& dir : a.runs) runs.emplace_back(run_label(dir), dir);
  std::sort(runs.begin(), runs.end());

  std::string long_csv = "run_label,round,metric,value\n";
  std::string summary = "run_label,metric,value\n";
  std::set<int> union_proved;
  char buf[64];

  for (const auto& [label, dir] : runs) {
    const fs::path stats_path = fs::path(dir) / "stats.csv";
    if (!fs::exists(stats_path)) {
      std::cerr << "missing stats: " << dir << " (skipped)\n";
      continue;
    }
    const std::vector<StatsRow> rows = parse_stats_csv(slurp(stats_path));
    for (const StatsRow& r : rows) {
      long_csv += label + "," + std::to_string(r.round) +
                  ",cumulative_proved," + std::to_string(r.cumulative_proved) +
                  "\n";
      long_csv +=
          label + "," + std::to_string(r.round) + ",proved," +
          std::to_string(r.proved) + "\n";
      if (r.val_proved_pct >= 0.0) {
        std::snprintf(buf, sizeof(buf), "%.4f", r.val_proved_pct);
        long_csv += label + "," + std::to_string(r.round) +
                    ",val_proved_pct," + buf + "\n";
      }
    }
    if (!rows.empty()) {
      summary += label + ",final_cumulative_proved," +
                 std::to_string(rows.back().cumulative_proved) + "\n";
    }
    for (int r = 0;; ++r) {
      const fs::path logs =
          fs::path(dir) / ("round_" + std::to_string(r)) / "logs" /
          "attempts.jsonl";
      if (!fs::exists(logs)) break;
      std::istringstream in(slurp(logs));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ProofLog log = proof_log_from_json(line);
        if (log.proved) union_proved.insert(log.goal_index);
      }
    }
  }
  summary += "union,union_proved," + std::to_string(union_proved.size()) + "\n";

  const auto spit = [](const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
  };
  spit(a.out, long_csv);
  fs::path summary_path(a.out);
  summary_path.replace_extension(".summary.csv");
  spit(summary_path, summary);
  std::cout << "union proved: " << union_proved.size() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroprover: a self-learning equational theorem prover"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-corpus", "generate a corpus");
  gen_cmd->add_option("--size", gen.size, "number of theorems")->required();
  gen_cmd->add_option("--seed", gen.seed, "generation seed")->required();
  gen_cmd->add_option("--out", gen.out, "output database path")->required();
  gen_cmd->add_option("--val-fraction", gen.val_fraction,
                      "validation fraction");

  SeedArgs sa;
  CLI::App* seed_cmd = app.add_subcommand("seed-run", "zero-knowledge seeding pass");
  seed_cmd->add_option("--db", sa.db, "database path")->required();
  seed_cmd->add_option("--variant", sa.variant,
                       "random-policy or shared-tower")->required();
  seed_cmd->add_option("--state", sa.state, "state directory")
      ->envname("ZP_STATE_ROOT")
      ->required();
  seed_cmd->add_option("--seed", sa.seed, "run seed")->required();

  LoopArgs la;
  CLI::App* loop_cmd = app.add_subcommand("loop", "run the learning loop");
  loop_cmd->add_option("--db", la.db, "database path")->required();
  loop_cmd->add_option("--state", la.state, "state directory")
      ->envname("ZP_STATE_ROOT")
      ->required();
  loop_cmd->add_option("--strategy", la.strategy,
                       "baseline, seeded, pet, bow1 or bow2");
  loop_cmd->add_flag("--extra-negatives", la.extra_negatives,
                     "mine negatives from failed applications");
  loop_cmd->add_option("--rounds", la.rounds, "total rounds")->required();
  loop_cmd->add_option("--goals-per-round", la.goals_per_round,
                       "goals sampled per round")->required();
  loop_cmd->add_option("--seed", la.seed, "run seed")->required();
  loop_cmd->add_option("--workers", la.workers,
                       "worker threads (1 = serial, same outputs)");
  loop_cmd->add_flag("--resume", la.resume, "continue an interrupted run");

  ReseedArgs ra;
  CLI::App* reseed_cmd =
      app.add_subcommand("reseed", "restart with a fresh model on old data");
  reseed_cmd->add_option("--from", ra.from, "source state directory")
      ->required();
  reseed_cmd->add_option("--state", ra.state, "new state directory")
      ->envname("ZP_STATE_ROOT")
      ->required();
  reseed_cmd->add_option("--seed", ra.seed, "run seed")->required();

  EvalArgs ea;
  CLI::App* eval_cmd = app.add_subcommand("eval", "pure-policy evaluation");
  eval_cmd->add_option("--state", ea.state, "state directory")
      ->envname("ZP_STATE_ROOT")
      ->required();
  eval_cmd->add_option("--round", ea.round, "round checkpoint to evaluate")
      ->required();
  eval_cmd->add_option("--split", ea.split, "train or val")->required();

  StatsArgs ta;
  CLI::App* stats_cmd =
      app.add_subcommand("stats", "merge runs into plot-ready CSVs");
  stats_cmd->add_option("--runs", ta.runs, "state directories")->required();
  stats_cmd->add_option("--out", ta.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) {
      run_gen_corpus(gen);
    } else if (seed_cmd->parsed()) {
      run_seed_cmd(sa);
    } else if (loop_cmd->parsed()) {
      run_loop_cmd(la);
    } else if (reseed_cmd->parsed()) {
      run_reseed_cmd(ra);
    } else if (eval_cmd->parsed()) {
      run_eval_cmd(ea);
    } else if (stats_cmd->parsed()) {
      run_stats_cmd(ta);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
