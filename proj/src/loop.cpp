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

#include "zp/loop.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "zp/common.hpp"

namespace zp {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* example_origin_name(ExampleOrigin o) {
  return o == ExampleOrigin::Pruning ? "pruning" : "failure";
}

const char* seed_variant_name(SeedVariant v) {
  return v == SeedVariant::RandomPolicy ? "random-policy" : "shared-tower";
}

std::optional<SeedVariant> seed_variant_from_name(std::string_view s) {
  if (s == "random-policy") return SeedVariant::RandomPolicy;
  if (s == "shared-tower") return SeedVariant::SharedTowerCosine;
  return std::nullopt;
}

std::string example_to_json(const TrainingExample& ex,
                            const SymbolTable& syms) {
  ojson j;
  j["goal"] = print_equation(ex.goal, syms);
  j["goal_index"] = ex.goal_index;
  j["tactic"] = ex.tactic;
  j["pos"] = ex.positives;
  j["neg"] = ex.negatives;
  j["origin"] = example_origin_name(ex.origin);
  j["round"] = ex.round;
  return j.dump();
}

TrainingExample example_from_json(const std::string& line, SymbolTable& syms) {
  TrainingExample ex;
  try {
    ojson j = ojson::parse(line);
    ex.goal = parse_equation(j.at("goal").get<std::string>(), syms);
    ex.goal_index = j.at("goal_index").get<int>();
    ex.tactic = j.at("tactic").get<int>();
    ex.positives = j.at("pos").get<std::vector<int>>();
    ex.negatives = j.at("neg").get<std::vector<int>>();
    ex.origin = j.at("origin").get<std::string>() == "pruning"
                    ? ExampleOrigin::Pruning
                    : ExampleOrigin::FailedApplication;
    ex.round = j.at("round").get<int>();
  } catch (const std::exception& e) {
    throw IoError(std::string("bad training example: ") + e.what());
  }
  return ex;
}

void ExampleStore::rotate() {
  historical.insert(historical.end(), std::make_move_iterator(fresh.begin()),
                    std::make_move_iterator(fresh.end()));
  fresh.clear();
}

std::vector<TrainingExample> extract_examples(const ProofLog& log, int round) {
  std::vector<TrainingExample> out;
  if (!log.proved) return out;
  for (const NodeRecord& n : log.nodes) {
    if (n.status != NodeStatus::Proved) continue;
    for (const AppRecord& a : n.apps) {
      if (!a.success) continue;
      TrainingExample ex;
      ex.goal = n.goal;
      ex.goal_index = log.goal_index;
      ex.tactic = static_cast<int>(a.tactic);
      ex.positives = a.params_after;
      for (const ScoredPremise& sp : a.params_before) {
        if (std::find(a.params_after.begin(), a.params_after.end(),
                      sp.index) == a.params_after.end()) {
          ex.negatives.push_back(sp.index);
        }
      }
      ex.origin = ExampleOrigin::Pruning;
      ex.round = round;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

namespace {

std::string mining_key(const Equation& goal, TacticId tactic,
                       const SymbolTable& syms) {
  return canonical_form(goal, syms) + "\t" + tactic_name(tactic);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

void record_for_mining(FailureIndex& idx, const ProofLog& log,
                       const SymbolTable& syms, int round) {
  for (const NodeRecord& n : log.nodes) {
    for (const AppRecord& a : n.apps) {
      if (a.success && a.kind == TacticOutcome::Kind::Closed) {
        const std::string key = mining_key(n.goal, a.tactic, syms);
        if (idx.closures.find(key) == idx.closures.end()) {
          idx.closures[key] = {sorted_unique(a.params_after), round};
        }
      } else if (!a.success && a.tactic == TacticId::Rewrite &&
                 !a.params_before.empty()) {
        FailureIndex::FailureRec rec;
        rec.goal = n.goal;
        rec.goal_index = log.goal_index;
        std::vector<int> p;
        for (const ScoredPremise& sp : a.params_before) p.push_back(sp.index);
        rec.params = sorted_unique(std::move(p));
        rec.round = round;
        idx.failures[mining_key(n.goal, a.tactic, syms)].push_back(
            std::move(rec));
      }
    }
  }
}

std::vector<TrainingExample> mine_failure_negatives(const FailureIndex& idx,
                                                    int round) {
  std::vector<TrainingExample> out;
  for (const auto& [key, recs] : idx.failures) {
    const auto it = idx.closures.find(key);
    if (it == idx.closures.end()) continue;
    const FailureIndex::Closure& c = it->second;
    std::set<std::vector<int>> seen;
    for (const FailureIndex::FailureRec& f : recs) {
      if (f.params == c.params) continue;
      if (!seen.insert(f.params).second) continue;  // earliest occurrence only
      const int emit_round = std::max({f.round, c.round, 0});
      if (emit_round != round) continue;
      TrainingExample ex;
      ex.goal = f.goal;
      ex.goal_index = f.goal_index;
      ex.tactic = -1;
      std::set_difference(f.params.begin(), f.params.end(), c.params.begin(),
                          c.params.end(), std::back_inserter(ex.negatives));
      if (ex.negatives.empty()) continue;
      ex.origin = ExampleOrigin::FailedApplication;
      ex.round = round;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

namespace {

ResolvedExample resolve_example(const TrainingExample& ex,
                                const TheoremDatabase& db,
                                const TokenStats& stats) {
  ResolvedExample r;
  r.goal_ids = token_ids(ex.goal, db.symbols(), stats);
  r.tactic = ex.tactic;
  for (int p : ex.positives) {
    r.pos.push_back(token_ids(db.entry(p).stmt, db.symbols(), stats));
  }
  for (int p : ex.negatives) {
    r.neg.push_back(token_ids(db.entry(p).stmt, db.symbols(), stats));
  }
  return r;
}

}  // namespace

std::pair<std::vector<ResolvedExample>, int> sample_batch(
    const ExampleStore& store, const TheoremDatabase& db,
    const TokenStats& stats, int n_fresh, int n_hist, Rng& rng) {
  std::vector<ResolvedExample> batch;
  int from_fresh = 0;
  const auto draw = [&](const std::vector<TrainingExample>& pool, int n) {
    for (int i = 0; i < n; ++i) {
      const TrainingExample& ex =
          pool[static_cast<size_t>(rng.next_below(pool.size()))];
      batch.push_back(resolve_example(ex, db, stats));
    }
  };
  if (store.fresh.empty() && store.historical.empty()) return {batch, 0};
  if (store.fresh.empty()) {
    draw(store.historical, n_fresh + n_hist);
  } else if (store.historical.empty()) {
    draw(store.fresh, n_fresh + n_hist);
    from_fresh = n_fresh + n_hist;
  } else {
    draw(store.fresh, n_fresh);
    from_fresh = n_fresh;
    draw(store.historical, n_hist);
  }
  return {batch, from_fresh};
}

std::string stats_csv_header() {
  return "round,attempted,proved,proved_pct,cumulative_proved,cumulative_pct,"
         "val_proved_pct,epsilon,strategy\n";
}

std::string stats_row_csv(const StatsRow& r) {
  char buf[256];
  std::string val;
  if (r.val_proved_pct >= 0.0) {
    std::snprintf(buf, sizeof(buf), "%.4f", r.val_proved_pct);
    val = buf;
  }
  std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.4f,%d,%.4f,%s,%.6f,%s\n",
                r.round, r.attempted, r.proved, r.proved_pct,
                r.cumulative_proved, r.cumulative_pct, val.c_str(), r.epsilon,
                r.strategy.c_str());
  return buf;
}

std::vector<StatsRow> parse_stats_csv(const std::string& text) {
  std::vector<StatsRow> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 9) throw IoError("malformed stats row: " + line);
    StatsRow r;
    r.round = std::stoi(f[0]);
    r.attempted = std::stoi(f[1]);
    r.proved = std::stoi(f[2]);
    r.proved_pct = std::stod(f[3]);
    r.cumulative_proved = std::stoi(f[4]);
    r.cumulative_pct = std::stod(f[5]);
    r.val_proved_pct = f[6].empty() ? -1.0 : std::stod(f[6]);
    r.epsilon = std::stod(f[7]);
    r.strategy = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ProofLog> prove_goals(const TheoremDatabase& db,
                                  const PremiseCache& cache,
                                  const ExplorationConfig& ecfg,
                                  const std::vector<AttemptConfig>& attempts,
                                  const SearchLimits* fixed_limits,
                                  int workers) {
  std::vector<ProofLog> logs(attempts.size());
  const auto run_one = [&](int i) {
    Rng rng(attempts[i].seed);
    const SearchLimits lim =
        fixed_limits ? *fixed_limits : SearchLimits::sample(rng);
    logs[i] = prove(attempts[i], db, cache, ecfg, lim, rng);
  };
  const int n = static_cast<int>(attempts.size());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int i = 0; i < n; ++i) run_one(i);
  }
  return logs;
}

EvalReport evaluate(const TheoremDatabase& db, const RankingCheckpoint& ckpt,
                    Split split, const SearchLimits& limits, int workers) {
  const TokenStats stats = compute_token_stats(db);
  const PremiseCache cache = PremiseCache::build(db, stats, ckpt.averaged);
  const std::vector<int> goals = db.indices_of(split);
  std::vector<AttemptConfig> attempts;
  for (int gi : goals) {
    AttemptConfig at;
    at.goal_index = gi;
    at.round = ckpt.round_produced;
    at.epsilon = 0.0;
    at.rank_mode = RankMode::Combiner;
    at.explore = Strategy::Baseline;
    at.seed = 0;
    attempts.push_back(at);
  }
  const std::vector<ProofLog> logs =
      prove_goals(db, cache, ExplorationConfig{}, attempts, &limits, workers);
  EvalReport rep;
  rep.attempted = static_cast<int>(goals.size());
  for (size_t i = 0; i < logs.size(); ++i) {
    if (logs[i].proved) {
      rep.proved++;
      rep.proved_indices.push_back(goals[i]);
    }
  }
  return rep;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string examples_jsonl(const std::vector<TrainingExample>& exs,
                           const SymbolTable& syms) {
  std::string out;
  for (const TrainingExample& ex : exs) {
    out += example_to_json(ex, syms);
    out += '\n';
  }
  return out;
}

std::string logs_jsonl(const std::vector<ProofLog>& logs) {
  std::string out;
  for (const ProofLog& log : logs) {
    out += proof_log_to_json(log);
    out += '\n';
  }
  return out;
}

std::string stats_csv_text(const std::vector<StatsRow>& rows) {
  std::string out = stats_csv_header();
  for (const StatsRow& r : rows) out += stats_row_csv(r);
  return out;
}

std::vector<int> goal_pool(const TheoremDatabase& db, const LoopConfig& cfg) {
  std::vector<int> pool = db.indices_of(Split::Train);
  if (cfg.train_on_val) {
    const std::vector<int> val = db.indices_of(Split::Val);
    pool.insert(pool.end(), val.begin(), val.end());
    std::sort(pool.begin(), pool.end());
  }
  return pool;
}

uint64_t db_vocab_hash(const TokenStats& stats) {
  return vocab_fingerprint(stats.vocab);
}

fs::path round_dir(const std::string& state_dir, int r) {
  return fs::path(state_dir) / ("round_" + std::to_string(r));
}

fs::path seed_dir(const std::string& state_dir) {
  return fs::path(state_dir) / "seed";
}

// Proof logs parsed back from a directory, with node goals re-derived.
std::vector<ProofLog> load_logs_with_goals(const fs::path& dir,
                                           const TheoremDatabase& db) {
  std::vector<ProofLog> logs;
  const fs::path file = dir / "logs" / "attempts.jsonl";
  if (!fs::exists(file)) return logs;
  for (const std::string& line : read_lines(file)) {
    ProofLog log = proof_log_from_json(line);
    const std::vector<Equation> goals = derive_node_goals(log, db);
    for (size_t i = 0; i < goals.size(); ++i) log.nodes[i].goal = goals[i];
    logs.push_back(std::move(log));
  }
  return logs;
}

void audit_fresh_examples(const std::vector<TrainingExample>& fresh,
                          const TheoremDatabase& db, int step_budget,
                          Rng& rng) {
  for (const TrainingExample& ex : fresh) {
    if (rng.next_double() >= 0.05) continue;
    if (ex.tactic < 0) continue;
    std::vector<Equation> eqs;
    for (int p : ex.positives) eqs.push_back(db.entry(p).stmt);
    const TacticOutcome out = apply_tactic(
        ex.goal, static_cast<TacticId>(ex.tactic), eqs, step_budget);
    if (!out.success()) {
      throw ReplayDivergence("training example failed its replay audit");
    }
  }
}

}  // namespace

bool state_is_seeded(const std::string& state_dir) {
  return fs::exists(seed_dir(state_dir) / "checkpoint");
}

SeedOutcome run_seed(TheoremDatabase& db, SeedVariant variant,
                     const LoopConfig& cfg, const std::string& state_dir,
                     LoopState& state) {
  const TokenStats stats = compute_token_stats(db);
  ModelDims dims = cfg.dims;
  dims.vocab = static_cast<int>(stats.vocab.size());

  Rng init_rng(mix_seed(cfg.seed, "init"));
  ModelParams params = variant == SeedVariant::RandomPolicy
                           ? init_params(dims, init_rng)
                           : init_shared_towers(dims, init_rng);
  state = LoopState{};
  state.ckpt.raw = params;
  state.ckpt.averaged = params;
  state.ckpt.round_produced = -1;
  state.opt = OptimizerState{};

  const PremiseCache cache = PremiseCache::build(db, stats, params);
  const std::vector<int> goals = goal_pool(db, cfg);
  std::vector<AttemptConfig> attempts;
  for (int gi : goals) {
    AttemptConfig at;
    at.goal_index = gi;
    at.round = -1;
    at.epsilon = 1.0;
    at.rank_mode = variant == SeedVariant::SharedTowerCosine
                       ? RankMode::Cosine
                       : RankMode::Combiner;
    at.explore = variant == SeedVariant::SharedTowerCosine ? Strategy::Seeded
                                                          : Strategy::Baseline;
    at.seed = mix_seed(cfg.seed, "seed-attempt", static_cast<uint64_t>(gi));
    attempts.push_back(at);
  }
  const std::vector<ProofLog> logs =
      prove_goals(db, cache, cfg.explore, attempts, nullptr, cfg.workers);

  SeedOutcome outcome;
  outcome.attempted = static_cast<int>(goals.size());
  for (const ProofLog& log : logs) {
    if (log.proved) outcome.proved++;
    std::vector<TrainingExample> exs = extract_examples(log, -1);
    state.store.historical.insert(state.store.historical.end(),
                                  std::make_move_iterator(exs.begin()),
                                  std::make_move_iterator(exs.end()));
    if (cfg.extra_negatives) {
      record_for_mining(state.mining, log, db.symbols(), -1);
    }
  }

  const fs::path dir = seed_dir(state_dir);
  write_file(dir / "logs" / "attempts.jsonl", logs_jsonl(logs));
  write_file(dir / "store.jsonl",
             examples_jsonl(state.store.historical, db.symbols()));
  save_checkpoint((dir / "checkpoint").string(), state.ckpt,
                  db_vocab_hash(stats));
  save_optimizer((dir / "optimizer").string(), state.opt);
  ojson meta;
  meta["variant"] = seed_variant_name(variant);
  meta["attempted"] = outcome.attempted;
  meta["proved"] = outcome.proved;
  write_file(dir / "meta.json", meta.dump() + "\n");
  return outcome;
}

void run_round(TheoremDatabase& db, const LoopConfig& cfg,
               const std::string& state_dir, LoopState& state) {
  const int r = state.next_round;
  const TokenStats stats = compute_token_stats(db);
  const std::vector<int> pool = goal_pool(db, cfg);
  if (cfg.goals_per_round > static_cast<int>(pool.size())) {
    throw ConfigError("goals_per_round exceeds the goal pool");
  }

  std::vector<int> chosen;
  {
    std::vector<int> idx = pool;
    Rng srng(mix_seed(cfg.seed, "sample", static_cast<uint64_t>(r)));
    for (int i = 0; i < cfg.goals_per_round; ++i) {
      const int j =
          i + static_cast<int>(srng.next_below(idx.size() - i));
      std::swap(idx[i], idx[j]);
      chosen.push_back(idx[i]);
    }
    std::sort(chosen.begin(), chosen.end());
  }

  const double eps = epsilon_schedule(r, cfg.explore);
  const PremiseCache cache =
      PremiseCache::build(db, stats, state.ckpt.averaged);
  std::vector<AttemptConfig> attempts;
  for (int gi : chosen) {
    AttemptConfig at;
    at.goal_index = gi;
    at.round = r;
    at.epsilon = eps;
    at.rank_mode = RankMode::Combiner;
    at.explore = cfg.strategy;
    at.seed = mix_seed(cfg.seed, "round-attempt", static_cast<uint64_t>(r),
                       static_cast<uint64_t>(gi));
    attempts.push_back(at);
  }
  const std::vector<ProofLog> logs =
      prove_goals(db, cache, cfg.explore, attempts, nullptr, cfg.workers);

  int proved_now = 0;
  for (const ProofLog& log : logs) {
    if (log.proved) {
      proved_now++;
      state.cumulative.insert(log.goal_index);
    }
    std::vector<TrainingExample> exs = extract_examples(log, r);
    state.store.fresh.insert(state.store.fresh.end(),
                             std::make_move_iterator(exs.begin()),
                             std::make_move_iterator(exs.end()));
    if (cfg.extra_negatives) {
      record_for_mining(state.mining, log, db.symbols(), r);
    }
  }
  if (cfg.extra_negatives) {
    std::vector<TrainingExample> mined =
        mine_failure_negatives(state.mining, r);
    state.store.fresh.insert(state.store.fresh.end(),
                             std::make_move_iterator(mined.begin()),
                             std::make_move_iterator(mined.end()));
  }

  {
    Rng arng(mix_seed(cfg.seed, "audit", static_cast<uint64_t>(r)));
    audit_fresh_examples(state.store.fresh, db,
                         SearchLimits{}.tactic_step_budget, arng);
  }

  ModelParams work = state.ckpt.raw;
  for (int s = 0; s < cfg.train_steps_per_round; ++s) {
    Rng brng(mix_seed(cfg.seed, "batch", static_cast<uint64_t>(r),
                      static_cast<uint64_t>(s)));
    auto [batch, from_fresh] = sample_batch(
        state.store, db, stats, cfg.batch_fresh, cfg.batch_historical, brng);
    (void)from_fresh;
    if (batch.empty()) continue;
    train_step(work, state.opt, batch, cfg.workers);
    ema_update(state.ckpt, work);
  }
  state.ckpt.round_produced = r;

  StatsRow row;
  row.round = r;
  row.attempted = static_cast<int>(chosen.size());
  row.proved = proved_now;
  row.proved_pct =
      row.attempted > 0 ? 100.0 * proved_now / row.attempted : 0.0;
  row.cumulative_proved = static_cast<int>(state.cumulative.size());
  row.cumulative_pct = pool.empty()
                           ? 0.0
                           : 100.0 * row.cumulative_proved /
                                 static_cast<double>(pool.size());
  if (cfg.eval_every > 0 && (r + 1) % cfg.eval_every == 0) {
    const EvalReport er =
        evaluate(db, state.ckpt, Split::Val, cfg.eval_limits, cfg.workers);
    row.val_proved_pct =
        er.attempted > 0 ? 100.0 * er.proved / er.attempted : 0.0;
  }
  row.epsilon = eps;
  row.strategy = strategy_name(cfg.strategy);
  state.stats.push_back(row);

  const fs::path dir = round_dir(state_dir, r);
  write_file(dir / "logs" / "attempts.jsonl", logs_jsonl(logs));
  write_file(dir / "store.jsonl",
             examples_jsonl(state.store.fresh, db.symbols()));
  save_checkpoint((dir / "checkpoint").string(), state.ckpt,
                  db_vocab_hash(stats));
  save_optimizer((dir / "optimizer").string(), state.opt);
  write_file(dir / "stats.csv", stats_csv_text(state.stats));
  write_file(fs::path(state_dir) / "stats.csv", stats_csv_text(state.stats));

  state.store.rotate();
  state.next_round = r + 1;
}

namespace {

int last_complete_round(const std::string& state_dir) {
  int last = -1;
  for (int r = 0;; ++r) {
    const fs::path dir = round_dir(state_dir, r);
    if (!fs::exists(dir / "stats.csv") || !fs::exists(dir / "checkpoint") ||
        !fs::exists(dir / "optimizer") || !fs::exists(dir / "store.jsonl")) {
      break;
    }
    const std::vector<StatsRow> rows =
        parse_stats_csv(read_file(dir / "stats.csv"));
    if (rows.empty() || rows.back().round != r) break;
    last = r;
  }
  return last;
}

std::vector<TrainingExample> load_store_file(const fs::path& file,
                                             SymbolTable& syms) {
  std::vector<TrainingExample> out;
  if (!fs::exists(file)) return out;
  for (const std::string& line : read_lines(file)) {
    out.push_back(example_from_json(line, syms));
  }
  return out;
}

}  // namespace

LoopState load_state(TheoremDatabase& db, const LoopConfig& cfg,
                     const std::string& state_dir) {
  if (!state_is_seeded(state_dir)) {
    throw IoError("state directory has no seed run: " + state_dir);
  }
  const TokenStats stats = compute_token_stats(db);
  const uint64_t vocab_hash = db_vocab_hash(stats);
  LoopState state;

  state.store.historical =
      load_store_file(seed_dir(state_dir) / "store.jsonl", db.symbols());
  if (cfg.extra_negatives) {
    for (const ProofLog& log :
         load_logs_with_goals(seed_dir(state_dir), db)) {
      record_for_mining(state.mining, log, db.symbols(), -1);
    }
  }

  const int last = last_complete_round(state_dir);
  const fs::path ckpt_dir =
      last >= 0 ? round_dir(state_dir, last) : seed_dir(state_dir);
  state.ckpt = load_checkpoint((ckpt_dir / "checkpoint").string(), vocab_hash);
  state.opt = load_optimizer((ckpt_dir / "optimizer").string());
  if (last >= 0) {
    state.stats = parse_stats_csv(read_file(ckpt_dir / "stats.csv"));
  }

  for (int r = 0; r <= last; ++r) {
    const fs::path dir = round_dir(state_dir, r);
    std::vector<TrainingExample> delta =
        load_store_file(dir / "store.jsonl", db.symbols());
    for (const ProofLog& log : load_logs_with_goals(dir, db)) {
      if (log.proved) state.cumulative.insert(log.goal_index);
      if (cfg.extra_negatives) {
        record_for_mining(state.mining, log, db.symbols(), r);
      }
    }
    if (static_cast<int>(state.cumulative.size()) !=
        state.stats[r].cumulative_proved) {
      throw IoError("cumulative count mismatch at round " + std::to_string(r));
    }
    state.store.historical.insert(state.store.historical.end(),
                                  std::make_move_iterator(delta.begin()),
                                  std::make_move_iterator(delta.end()));
  }
  state.next_round = last + 1;
  return state;
}

LoopState run_reseed(TheoremDatabase& db, const LoopConfig& cfg,
                     const std::string& from_dir,
                     const std::string& state_dir) {
  if (!state_is_seeded(from_dir)) {
    throw IoError("source state has no seed run: " + from_dir);
  }
  const TokenStats stats = compute_token_stats(db);
  ModelDims dims = cfg.dims;
  dims.vocab = static_cast<int>(stats.vocab.size());

  LoopState state;
  state.store.historical =
      load_store_file(seed_dir(from_dir) / "store.jsonl", db.symbols());
  const int last = last_complete_round(from_dir);
  for (int r = 0; r <= last; ++r) {
    std::vector<TrainingExample> delta = load_store_file(
        round_dir(from_dir, r) / "store.jsonl", db.symbols());
    state.store.historical.insert(state.store.historical.end(),
                                  std::make_move_iterator(delta.begin()),
                                  std::make_move_iterator(delta.end()));
  }

  Rng init_rng(mix_seed(cfg.seed, "reseed-init"));
  ModelParams params = init_params(dims, init_rng);
  state.ckpt.raw = params;
  state.ckpt.averaged = params;
  state.ckpt.round_produced = -1;
  state.opt = OptimizerState{};

  ModelParams work = state.ckpt.raw;
  for (int s = 0; s < cfg.reseed_train_steps; ++s) {
    Rng brng(mix_seed(cfg.seed, "reseed-batch", static_cast<uint64_t>(s)));
    auto [batch, from_fresh] = sample_batch(
        state.store, db, stats, cfg.batch_fresh, cfg.batch_historical, brng);
    (void)from_fresh;
    if (batch.empty()) continue;
    train_step(work, state.opt, batch, cfg.workers);
    ema_update(state.ckpt, work);
  }

  const fs::path dir = seed_dir(state_dir);
  write_file(dir / "logs" / "attempts.jsonl", "");
  write_file(dir / "store.jsonl",
             examples_jsonl(state.store.historical, db.symbols()));
  save_checkpoint((dir / "checkpoint").string(), state.ckpt,
                  db_vocab_hash(stats));
  save_optimizer((dir / "optimizer").string(), state.opt);
  ojson meta;
  meta["variant"] = "reseed";
  meta["inherited_examples"] = state.store.historical.size();
  meta["initial_steps"] = cfg.reseed_train_steps;
  write_file(dir / "meta.json", meta.dump() + "\n");
  return state;
}

}  // namespace zp
