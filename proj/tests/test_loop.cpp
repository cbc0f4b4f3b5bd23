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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "test_util.hpp"
#include "zp/loop.hpp"

namespace fs = std::filesystem;
using namespace zp;

namespace {

fs::path tmpdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "zp_loop_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

int line_count(const fs::path& path) {
  std::istringstream in(slurp(path));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) n++;
  }
  return n;
}

const TheoremDatabase& base_db() {
  static const TheoremDatabase db = [] {
    CorpusConfig c;
    c.n_theorems = 60;
    c.rng_seed = 11;
    return generate_corpus(c, nullptr);
  }();
  return db;
}

LoopConfig small_cfg(uint64_t seed) {
  LoopConfig cfg;
  cfg.strategy = Strategy::BoW2;
  cfg.goals_per_round = 12;
  cfg.train_steps_per_round = 15;
  cfg.eval_every = 0;
  cfg.reseed_train_steps = 25;
  cfg.seed = seed;
  cfg.dims.D = 16;
  cfg.dims.E = 16;
  cfg.dims.H = 32;
  return cfg;
}

AppRecord success_app(TacticId t, std::vector<ScoredPremise> before,
                      std::vector<int> after, TacticOutcome::Kind kind,
                      std::vector<int> children = {}) {
  AppRecord a;
  a.tactic = t;
  a.params_before = std::move(before);
  a.params_after = std::move(after);
  a.success = true;
  a.kind = kind;
  a.children = std::move(children);
  return a;
}

AppRecord failed_app(TacticId t, std::vector<ScoredPremise> before,
                     FailReason reason) {
  AppRecord a;
  a.tactic = t;
  a.params_before = std::move(before);
  a.success = false;
  a.kind = TacticOutcome::Kind::Failed;
  a.reason = reason;
  return a;
}

NodeRecord node_rec(int id, int parent, NodeStatus status, Equation goal,
                    std::vector<AppRecord> apps) {
  NodeRecord n;
  n.id = id;
  n.parent = parent;
  n.depth = parent < 0 ? 0 : 1;
  n.status = status;
  n.goal = std::move(goal);
  n.apps = std::move(apps);
  return n;
}

ScoredPremise sp(int index, bool from_explore = false) {
  ScoredPremise s;
  s.index = index;
  s.source = from_explore ? PremiseSource::Explore : PremiseSource::Policy;
  return s;
}

}  // namespace

TEST_CASE("extract_examples walks proved nodes of proved logs only") {
  SymbolTable syms;
  const Equation ga = zptest::EQ("(= (m (m e a) (m e b)) (m a b))", syms);
  const Equation gb = zptest::EQ("(= (m e a) a)", syms);
  const Equation gc = zptest::EQ("(= (m e b) b)", syms);

  ProofLog log;
  log.goal_index = 50;
  log.round = 4;
  log.proved = true;
  log.nodes.push_back(node_rec(
      0, -1, NodeStatus::Proved, ga,
      {failed_app(TacticId::Rewrite, {sp(2), sp(5, true)}, FailReason::Timeout),
       success_app(TacticId::Cong, {}, {}, TacticOutcome::Kind::Subgoals,
                   {1, 2})}));
  log.nodes.push_back(node_rec(
      1, 0, NodeStatus::Proved, gb,
      {success_app(TacticId::Rewrite, {sp(3), sp(7, true), sp(1)}, {3, 1},
                   TacticOutcome::Kind::Closed)}));
  log.nodes.push_back(node_rec(
      2, 0, NodeStatus::Open, gc,
      {success_app(TacticId::Rewrite, {sp(4)}, {4},
                   TacticOutcome::Kind::Closed)}));

  const std::vector<TrainingExample> exs = extract_examples(log, 4);
  REQUIRE(exs.size() == 2);

  CHECK(exs[0].tactic == static_cast<int>(TacticId::Cong));
  CHECK(exs[0].positives.empty());
  CHECK(exs[0].negatives.empty());
  CHECK(exs[0].goal_index == 50);
  CHECK(exs[0].round == 4);
  CHECK(exs[0].origin == ExampleOrigin::Pruning);
  CHECK(term_eq(exs[0].goal.lhs, ga.lhs));

  CHECK(exs[1].tactic == static_cast<int>(TacticId::Rewrite));
  CHECK(exs[1].positives == std::vector<int>{3, 1});
  CHECK(exs[1].negatives == std::vector<int>{7});  // params_before order
  CHECK(term_eq(exs[1].goal.rhs, gb.rhs));

  SUBCASE("failed-root log yields nothing") {
    ProofLog failed = log;
    failed.proved = false;
    CHECK(extract_examples(failed, 4).empty());
  }

  SUBCASE("abandoned nodes contribute nothing") {
    ProofLog ab = log;
    ab.nodes[1].status = NodeStatus::Abandoned;
    CHECK(extract_examples(ab, 4).size() == 1);
  }
}

TEST_CASE("failure mining pairs failed and successful parameter sets") {
  SymbolTable syms;
  // Same goal up to variable renaming: canonical keys must collide.
  const Equation g_u = zptest::EQ("(= (m u u) u)", syms);
  const Equation g_w = zptest::EQ("(= (m w w) w)", syms);
  REQUIRE(canonical_form(g_u, syms) == canonical_form(g_w, syms));

  const auto fail_log = [&](const Equation& g, std::vector<int> params,
                            int goal_index) {
    ProofLog log;
    log.goal_index = goal_index;
    std::vector<ScoredPremise> before;
    for (int p : params) before.push_back(sp(p));
    log.nodes.push_back(node_rec(
        0, -1, NodeStatus::Abandoned, g,
        {failed_app(TacticId::Rewrite, before, FailReason::Unchanged)}));
    return log;
  };
  const auto close_log = [&](const Equation& g, std::vector<int> params,
                             int goal_index) {
    ProofLog log;
    log.goal_index = goal_index;
    log.proved = true;
    std::vector<ScoredPremise> before;
    for (int p : params) before.push_back(sp(p));
    log.nodes.push_back(node_rec(
        0, -1, NodeStatus::Proved, g,
        {success_app(TacticId::Rewrite, before, params,
                     TacticOutcome::Kind::Closed)}));
    return log;
  };

  SUBCASE("failure first, closure later, emitted at the closure round") {
    FailureIndex idx;
    record_for_mining(idx, fail_log(g_u, {3, 1, 2}, 40), syms, 0);
    CHECK(mine_failure_negatives(idx, 0).empty());
    record_for_mining(idx, close_log(g_w, {2}, 44), syms, 1);
    CHECK(mine_failure_negatives(idx, 0).empty());
    const auto mined = mine_failure_negatives(idx, 1);
    REQUIRE(mined.size() == 1);
    CHECK(mined[0].negatives == std::vector<int>{1, 3});
    CHECK(mined[0].tactic == -1);
    CHECK(mined[0].positives.empty());
    CHECK(mined[0].goal_index == 40);
    CHECK(mined[0].round == 1);
    CHECK(mined[0].origin == ExampleOrigin::FailedApplication);
    CHECK(term_eq(mined[0].goal.lhs, g_u.lhs));
    CHECK(mine_failure_negatives(idx, 2).empty());
  }

  SUBCASE("closure first, failure later, emitted at the failure round") {
    FailureIndex idx;
    record_for_mining(idx, close_log(g_u, {2}, 44), syms, 0);
    record_for_mining(idx, fail_log(g_w, {2, 9}, 51), syms, 2);
    CHECK(mine_failure_negatives(idx, 0).empty());
    CHECK(mine_failure_negatives(idx, 1).empty());
    const auto mined = mine_failure_negatives(idx, 2);
    REQUIRE(mined.size() == 1);
    CHECK(mined[0].negatives == std::vector<int>{9});
  }

  SUBCASE("identical or subsumed sets emit nothing") {
    FailureIndex idx;
    record_for_mining(idx, close_log(g_u, {2, 5}, 44), syms, 0);
    record_for_mining(idx, fail_log(g_w, {2, 5}, 40), syms, 1);
    record_for_mining(idx, fail_log(g_w, {2}, 40), syms, 1);
    CHECK(mine_failure_negatives(idx, 1).empty());
  }

  SUBCASE("failures without a closure are never emitted") {
    FailureIndex idx;
    record_for_mining(idx, fail_log(g_u, {1, 2}, 40), syms, 0);
    for (int r = 0; r < 4; ++r) CHECK(mine_failure_negatives(idx, r).empty());
  }

  SUBCASE("a repeated failed set is emitted once, at its first chance") {
    FailureIndex idx;
    record_for_mining(idx, close_log(g_u, {2}, 44), syms, 0);
    record_for_mining(idx, fail_log(g_w, {2, 7}, 40), syms, 1);
    record_for_mining(idx, fail_log(g_u, {7, 2}, 46), syms, 3);
    CHECK(mine_failure_negatives(idx, 1).size() == 1);
    CHECK(mine_failure_negatives(idx, 3).empty());
  }

  SUBCASE("seed-run pairs are emitted at round zero") {
    FailureIndex idx;
    record_for_mining(idx, fail_log(g_u, {0, 3}, 40), syms, -1);
    record_for_mining(idx, close_log(g_w, {0}, 44), syms, -1);
    const auto mined = mine_failure_negatives(idx, 0);
    REQUIRE(mined.size() == 1);
    CHECK(mined[0].negatives == std::vector<int>{3});
    CHECK(mined[0].round == 0);
  }

  SUBCASE("the first recorded closure wins") {
    FailureIndex idx;
    record_for_mining(idx, close_log(g_u, {2}, 44), syms, 1);
    record_for_mining(idx, close_log(g_w, {4}, 45), syms, 0);
    record_for_mining(idx, fail_log(g_u, {2, 4}, 40), syms, 1);
    const auto mined = mine_failure_negatives(idx, 1);
    REQUIRE(mined.size() == 1);
    CHECK(mined[0].negatives == std::vector<int>{4});
  }

  SUBCASE("only parameterized rewrite failures are recorded") {
    FailureIndex idx;
    ProofLog log;
    log.goal_index = 40;
    log.nodes.push_back(node_rec(
        0, -1, NodeStatus::Abandoned, g_u,
        {failed_app(TacticId::Sym, {}, FailReason::Unchanged),
         failed_app(TacticId::Rewrite, {}, FailReason::Error)}));
    record_for_mining(idx, log, syms, 0);
    CHECK(idx.failures.empty());
  }

  SUBCASE("different tactics never pair") {
    FailureIndex idx;
    record_for_mining(idx, fail_log(g_u, {1}, 40), syms, 0);
    ProofLog refl;
    refl.goal_index = 44;
    refl.proved = true;
    refl.nodes.push_back(
        node_rec(0, -1, NodeStatus::Proved, g_w,
                 {success_app(TacticId::Refl, {}, {},
                              TacticOutcome::Kind::Closed)}));
    record_for_mining(idx, refl, syms, 0);
    CHECK(mine_failure_negatives(idx, 0).empty());
  }
}

TEST_CASE("training example json round trip") {
  SymbolTable syms;
  TrainingExample ex;
  ex.goal = zptest::EQ("(= (m e a) a)", syms);
  ex.goal_index = 37;
  ex.tactic = 3;
  ex.positives = {4, 9};
  ex.negatives = {1, 20};
  ex.origin = ExampleOrigin::Pruning;
  ex.round = -1;

  const std::string line = example_to_json(ex, syms);
  const TrainingExample back = example_from_json(line, syms);
  CHECK(term_eq(back.goal.lhs, ex.goal.lhs));
  CHECK(term_eq(back.goal.rhs, ex.goal.rhs));
  CHECK(back.goal_index == 37);
  CHECK(back.tactic == 3);
  CHECK(back.positives == ex.positives);
  CHECK(back.negatives == ex.negatives);
  CHECK(back.origin == ExampleOrigin::Pruning);
  CHECK(back.round == -1);

  ex.origin = ExampleOrigin::FailedApplication;
  ex.tactic = -1;
  const TrainingExample back2 = example_from_json(example_to_json(ex, syms), syms);
  CHECK(back2.origin == ExampleOrigin::FailedApplication);
  CHECK(back2.tactic == -1);

  CHECK_THROWS_AS(example_from_json("{\"goal\": 3}", syms), IoError);
}

TEST_CASE("stats csv formatting and parsing") {
  CHECK(stats_csv_header() ==
        "round,attempted,proved,proved_pct,cumulative_proved,cumulative_pct,"
        "val_proved_pct,epsilon,strategy\n");

  StatsRow r;
  r.round = 3;
  r.attempted = 200;
  r.proved = 57;
  r.proved_pct = 28.5;
  r.cumulative_proved = 412;
  r.cumulative_pct = 51.5;
  r.val_proved_pct = -1.0;
  r.epsilon = 0.55;
  r.strategy = "bow2";
  CHECK(stats_row_csv(r) == "3,200,57,28.5000,412,51.5000,,0.550000,bow2\n");

  r.val_proved_pct = 12.5;
  CHECK(stats_row_csv(r) ==
        "3,200,57,28.5000,412,51.5000,12.5000,0.550000,bow2\n");

  const std::string text = stats_csv_header() +
                           "0,10,2,20.0000,2,4.0000,,1.000000,pet\n" +
                           "1,10,3,30.0000,5,10.0000,7.5000,0.955000,pet\n";
  const std::vector<StatsRow> rows = parse_stats_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].round == 0);
  CHECK(rows[0].val_proved_pct == doctest::Approx(-1.0));
  CHECK(rows[0].epsilon == doctest::Approx(1.0));
  CHECK(rows[0].strategy == "pet");
  CHECK(rows[1].val_proved_pct == doctest::Approx(7.5));
  CHECK(rows[1].cumulative_proved == 5);

  CHECK(parse_stats_csv(stats_csv_header()).empty());
  CHECK_THROWS_AS(parse_stats_csv(stats_csv_header() + "1,2,3\n"), IoError);
}

TEST_CASE("sample_batch keeps the fresh-to-historical mix exact") {
  TheoremDatabase db = base_db();
  const TokenStats stats = compute_token_stats(db);

  ExampleStore store;
  const auto mk = [&](int tactic, int prem) {
    TrainingExample ex;
    ex.goal = db.entry(40).stmt;
    ex.goal_index = 40;
    ex.tactic = tactic;
    ex.positives = {prem};
    ex.negatives = {prem + 1};
    return ex;
  };
  for (int i = 0; i < 7; ++i) store.fresh.push_back(mk(1, i));
  for (int i = 0; i < 9; ++i) store.historical.push_back(mk(2, i));

  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [batch, from_fresh] = sample_batch(store, db, stats, 5, 11, rng);
    REQUIRE(batch.size() == 16);
    REQUIRE(from_fresh == 5);
    for (int i = 0; i < 5; ++i) CHECK(batch[i].tactic == 1);
    for (int i = 5; i < 16; ++i) CHECK(batch[i].tactic == 2);
  }

  SUBCASE("an empty pool's share falls back to the other pool") {
    ExampleStore no_fresh;
    no_fresh.historical = store.historical;
    auto [b1, f1] = sample_batch(no_fresh, db, stats, 5, 11, rng);
    CHECK(b1.size() == 16);
    CHECK(f1 == 0);
    for (const auto& ex : b1) CHECK(ex.tactic == 2);

    ExampleStore no_hist;
    no_hist.fresh = store.fresh;
    auto [b2, f2] = sample_batch(no_hist, db, stats, 5, 11, rng);
    CHECK(b2.size() == 16);
    CHECK(f2 == 16);
    for (const auto& ex : b2) CHECK(ex.tactic == 1);

    ExampleStore empty;
    auto [b3, f3] = sample_batch(empty, db, stats, 5, 11, rng);
    CHECK(b3.empty());
    CHECK(f3 == 0);
  }

  SUBCASE("resolution maps premise indices to token id lists") {
    ExampleStore one;
    TrainingExample ex;
    ex.goal = db.entry(3).stmt;
    ex.goal_index = 30;
    ex.tactic = 3;
    ex.positives = {0};
    ex.negatives = {2};
    one.fresh.push_back(ex);
    Rng r2(1);
    const auto [batch, n] = sample_batch(one, db, stats, 1, 0, r2);
    REQUIRE(batch.size() == 1);
    CHECK(n == 1);
    CHECK(batch[0].goal_ids == token_ids(db.entry(3).stmt, db.symbols(), stats));
    REQUIRE(batch[0].pos.size() == 1);
    CHECK(batch[0].pos[0] == token_ids(db.entry(0).stmt, db.symbols(), stats));
    REQUIRE(batch[0].neg.size() == 1);
    CHECK(batch[0].neg[0] == token_ids(db.entry(2).stmt, db.symbols(), stats));
  }
}

TEST_CASE("seed runs are deterministic and fill the historical store") {
  const LoopConfig cfg = small_cfg(123);

  TheoremDatabase dbA = base_db();
  const fs::path dirA = tmpdir("seed_a");
  LoopState stateA;
  const SeedOutcome outA =
      run_seed(dbA, SeedVariant::RandomPolicy, cfg, dirA.string(), stateA);

  TheoremDatabase dbB = base_db();
  const fs::path dirB = tmpdir("seed_b");
  LoopState stateB;
  const SeedOutcome outB =
      run_seed(dbB, SeedVariant::RandomPolicy, cfg, dirB.string(), stateB);

  CHECK(outA.attempted == static_cast<int>(dbA.indices_of(Split::Train).size()));
  CHECK(outA.proved == outB.proved);
  CHECK(outA.proved >= 1);

  CHECK(slurp(dirA / "seed" / "store.jsonl") ==
        slurp(dirB / "seed" / "store.jsonl"));
  CHECK(slurp(dirA / "seed" / "logs" / "attempts.jsonl") ==
        slurp(dirB / "seed" / "logs" / "attempts.jsonl"));
  CHECK(slurp(dirA / "seed" / "checkpoint") ==
        slurp(dirB / "seed" / "checkpoint"));

  CHECK(state_is_seeded(dirA.string()));
  CHECK_FALSE(state_is_seeded(tmpdir("seed_none").string()));

  CHECK(stateA.next_round == 0);
  CHECK(stateA.store.fresh.empty());
  CHECK_FALSE(stateA.store.historical.empty());
  for (const TrainingExample& ex : stateA.store.historical) {
    CHECK(ex.round == -1);
    CHECK(ex.origin == ExampleOrigin::Pruning);
  }
  CHECK(slurp(dirA / "seed" / "meta.json").find("random-policy") !=
        std::string::npos);
  CHECK(line_count(dirA / "seed" / "store.jsonl") ==
        static_cast<int>(stateA.store.historical.size()));

  SUBCASE("the shared-tower variant also proves and persists") {
    TheoremDatabase dbC = base_db();
    const fs::path dirC = tmpdir("seed_c");
    LoopState stateC;
    const SeedOutcome outC = run_seed(dbC, SeedVariant::SharedTowerCosine, cfg,
                                      dirC.string(), stateC);
    CHECK(outC.proved >= 1);
    CHECK(slurp(dirC / "seed" / "meta.json").find("shared-tower") !=
          std::string::npos);
    CHECK(state_is_seeded(dirC.string()));
  }
}

TEST_CASE("rounds advance, persist and stay deterministic") {
  const LoopConfig cfg = small_cfg(5);

  const auto pipeline = [&](const fs::path& dir, TheoremDatabase& db) {
    LoopState state;
    run_seed(db, SeedVariant::SharedTowerCosine, cfg, dir.string(), state);
    run_round(db, cfg, dir.string(), state);
    run_round(db, cfg, dir.string(), state);
    return state;
  };

  TheoremDatabase dbA = base_db();
  const fs::path dirA = tmpdir("round_a");
  const LoopState stateA = pipeline(dirA, dbA);

  CHECK(stateA.next_round == 2);
  REQUIRE(stateA.stats.size() == 2);
  CHECK(stateA.stats[0].round == 0);
  CHECK(stateA.stats[1].round == 1);
  CHECK(stateA.stats[0].attempted == cfg.goals_per_round);
  CHECK(stateA.stats[0].epsilon ==
        doctest::Approx(epsilon_schedule(0, cfg.explore)));
  CHECK(stateA.stats[0].strategy == "bow2");
  CHECK(stateA.stats[1].cumulative_proved >= stateA.stats[0].cumulative_proved);
  CHECK(stateA.stats[1].cumulative_proved ==
        static_cast<int>(stateA.cumulative.size()));
  CHECK(stateA.store.fresh.empty());

  for (int r = 0; r < 2; ++r) {
    const fs::path rd = dirA / ("round_" + std::to_string(r));
    CHECK(fs::exists(rd / "checkpoint"));
    CHECK(fs::exists(rd / "optimizer"));
    CHECK(fs::exists(rd / "store.jsonl"));
    CHECK(fs::exists(rd / "stats.csv"));
    CHECK(fs::exists(rd / "logs" / "attempts.jsonl"));
  }
  CHECK(slurp(dirA / "stats.csv") == slurp(dirA / "round_1" / "stats.csv"));

  const int seed_n = line_count(dirA / "seed" / "store.jsonl");
  const int d0 = line_count(dirA / "round_0" / "store.jsonl");
  const int d1 = line_count(dirA / "round_1" / "store.jsonl");
  CHECK(static_cast<int>(stateA.store.historical.size()) == seed_n + d0 + d1);

  const std::vector<StatsRow> parsed =
      parse_stats_csv(slurp(dirA / "stats.csv"));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[1].proved == stateA.stats[1].proved);
  CHECK(parsed[1].strategy == "bow2");

  int proved_in_logs = 0;
  {
    std::istringstream in(slurp(dirA / "round_0" / "logs" / "attempts.jsonl"));
    std::string line;
    int prev_gi = -1;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const ProofLog log = proof_log_from_json(line);
      CHECK(log.goal_index > prev_gi);  // ascending goal order
      prev_gi = log.goal_index;
      CHECK(log.round == 0);
      if (log.proved) proved_in_logs++;
    }
  }
  CHECK(proved_in_logs == stateA.stats[0].proved);

  SUBCASE("an identical pipeline reproduces every artifact byte for byte") {
    TheoremDatabase dbB = base_db();
    const fs::path dirB = tmpdir("round_b");
    pipeline(dirB, dbB);
    CHECK(slurp(dirA / "stats.csv") == slurp(dirB / "stats.csv"));
    CHECK(slurp(dirA / "round_1" / "checkpoint") ==
          slurp(dirB / "round_1" / "checkpoint"));
    CHECK(slurp(dirA / "round_1" / "optimizer") ==
          slurp(dirB / "round_1" / "optimizer"));
    CHECK(slurp(dirA / "round_0" / "store.jsonl") ==
          slurp(dirB / "round_0" / "store.jsonl"));
    CHECK(slurp(dirA / "round_0" / "logs" / "attempts.jsonl") ==
          slurp(dirB / "round_0" / "logs" / "attempts.jsonl"));
  }

  SUBCASE("oversized goals_per_round is rejected") {
    TheoremDatabase dbC = base_db();
    LoopConfig big = cfg;
    big.goals_per_round = 10000;
    const fs::path dirC = tmpdir("round_c");
    LoopState st;
    run_seed(dbC, SeedVariant::SharedTowerCosine, big, dirC.string(), st);
    CHECK_THROWS_AS(run_round(dbC, big, dirC.string(), st), ConfigError);
  }
}

TEST_CASE("evaluate is pure, repeatable and handles empty splits") {
  TheoremDatabase db = base_db();
  const LoopConfig cfg = small_cfg(21);
  const fs::path dir = tmpdir("eval");
  LoopState state;
  run_seed(db, SeedVariant::SharedTowerCosine, cfg, dir.string(), state);

  const EvalReport a =
      evaluate(db, state.ckpt, Split::Val, cfg.eval_limits, 1);
  const EvalReport b =
      evaluate(db, state.ckpt, Split::Val, cfg.eval_limits, 1);
  CHECK(a.attempted == static_cast<int>(db.indices_of(Split::Val).size()));
  CHECK(a.attempted > 0);
  CHECK(a.proved == b.proved);
  CHECK(a.proved_indices == b.proved_indices);
  CHECK(std::is_sorted(a.proved_indices.begin(), a.proved_indices.end()));
  CHECK(static_cast<int>(a.proved_indices.size()) == a.proved);

  SUBCASE("an empty split reports zero attempts") {
    CorpusConfig c;
    c.n_theorems = 40;
    c.val_fraction = 0.0;
    c.rng_seed = 3;
    TheoremDatabase db0 = generate_corpus(c, nullptr);
    const TokenStats st0 = compute_token_stats(db0);
    ModelDims dims = cfg.dims;
    dims.vocab = static_cast<int>(st0.vocab.size());
    Rng rng(1);
    RankingCheckpoint ck;
    ck.raw = init_params(dims, rng);
    ck.averaged = ck.raw;
    const EvalReport r = evaluate(db0, ck, Split::Val, cfg.eval_limits, 1);
    CHECK(r.attempted == 0);
    CHECK(r.proved == 0);
  }
}

TEST_CASE("a non-finite loss aborts the round before anything is persisted") {
  TheoremDatabase db = base_db();
  const LoopConfig cfg = small_cfg(31);
  const fs::path dir = tmpdir("nonfinite");
  LoopState state;
  run_seed(db, SeedVariant::RandomPolicy, cfg, dir.string(), state);
  REQUIRE_FALSE(state.store.historical.empty());

  for (double& x : state.ckpt.raw.w) {
    x = std::numeric_limits<double>::quiet_NaN();
  }
  CHECK_THROWS_AS(run_round(db, cfg, dir.string(), state), NonFiniteLoss);
  CHECK_FALSE(fs::exists(dir / "round_0"));
  CHECK_FALSE(fs::exists(dir / "stats.csv"));

  const TokenStats stats = compute_token_stats(db);
  const RankingCheckpoint kept = load_checkpoint(
      (dir / "seed" / "checkpoint").string(), vocab_fingerprint(stats.vocab));
  CHECK(kept.raw.w.size() == state.ckpt.raw.w.size());
}

TEST_CASE("resume reproduces the uninterrupted run byte for byte") {
  LoopConfig cfg = small_cfg(77);
  cfg.goals_per_round = 10;
  cfg.train_steps_per_round = 10;
  cfg.eval_every = 2;
  cfg.extra_negatives = true;

  TheoremDatabase dbA = base_db();
  const fs::path dirA = tmpdir("resume_a");
  {
    LoopState state;
    run_seed(dbA, SeedVariant::SharedTowerCosine, cfg, dirA.string(), state);
    for (int r = 0; r < 3; ++r) run_round(dbA, cfg, dirA.string(), state);
  }

  TheoremDatabase dbB = base_db();
  const fs::path dirB = tmpdir("resume_b");
  {
    LoopState state;
    run_seed(dbB, SeedVariant::SharedTowerCosine, cfg, dirB.string(), state);
    for (int r = 0; r < 2; ++r) run_round(dbB, cfg, dirB.string(), state);
  }
  {
    // Fresh process simulation: state rebuilt from disk only.
    TheoremDatabase dbB2 = base_db();
    LoopState resumed = load_state(dbB2, cfg, dirB.string());
    CHECK(resumed.next_round == 2);
    run_round(dbB2, cfg, dirB.string(), resumed);
  }
  for (const char* f :
       {"stats.csv", "checkpoint", "optimizer", "store.jsonl"}) {
    CHECK(slurp(dirA / "round_2" / f) == slurp(dirB / "round_2" / f));
  }
  CHECK(slurp(dirA / "round_2" / "logs" / "attempts.jsonl") ==
        slurp(dirB / "round_2" / "logs" / "attempts.jsonl"));

  // The eval cadence fired at round 1: its row has a val column, round 0's
  // stays blank.
  const std::vector<StatsRow> rows = parse_stats_csv(slurp(dirA / "stats.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].val_proved_pct < 0.0);
  CHECK(rows[1].val_proved_pct >= 0.0);

  SUBCASE("a torn round directory is redone cleanly") {
    const fs::path dirC = tmpdir("resume_c");
    fs::copy(dirB, dirC, fs::copy_options::recursive);
    fs::remove(dirC / "round_2" / "stats.csv");  // crash before the marker
    TheoremDatabase dbC = base_db();
    LoopState resumed = load_state(dbC, cfg, dirC.string());
    CHECK(resumed.next_round == 2);
    run_round(dbC, cfg, dirC.string(), resumed);
    CHECK(slurp(dirA / "round_2" / "stats.csv") ==
          slurp(dirC / "round_2" / "stats.csv"));
    CHECK(slurp(dirA / "round_2" / "checkpoint") ==
          slurp(dirC / "round_2" / "checkpoint"));
    CHECK(slurp(dirA / "round_2" / "store.jsonl") ==
          slurp(dirC / "round_2" / "store.jsonl"));
  }

  SUBCASE("tampered logs break the cumulative cross-check") {
    const fs::path dirD = tmpdir("resume_d");
    fs::copy(dirA, dirD, fs::copy_options::recursive);
    std::string logs = slurp(dirD / "round_0" / "logs" / "attempts.jsonl");
    const std::string from = "\"result\":\"proved\"";
    const std::string to = "\"result\":\"failed\"";
    const size_t at = logs.find(from);
    REQUIRE(at != std::string::npos);
    logs.replace(at, from.size(), to);
    spit(dirD / "round_0" / "logs" / "attempts.jsonl", logs);
    TheoremDatabase dbD = base_db();
    CHECK_THROWS_AS(load_state(dbD, cfg, dirD.string()), IoError);
  }

  SUBCASE("load_state refuses an unseeded directory") {
    TheoremDatabase dbE = base_db();
    CHECK_THROWS_AS(load_state(dbE, cfg, tmpdir("resume_e").string()),
                    IoError);
  }
}

TEST_CASE("reseeding inherits every example and restarts the model") {
  const LoopConfig cfg = small_cfg(9);
  TheoremDatabase db = base_db();
  const fs::path dirR = tmpdir("reseed_from");
  LoopState state;
  run_seed(db, SeedVariant::SharedTowerCosine, cfg, dirR.string(), state);
  run_round(db, cfg, dirR.string(), state);
  run_round(db, cfg, dirR.string(), state);

  const int old_total = line_count(dirR / "seed" / "store.jsonl") +
                        line_count(dirR / "round_0" / "store.jsonl") +
                        line_count(dirR / "round_1" / "store.jsonl");
  REQUIRE(old_total > 0);

  const fs::path dirN = tmpdir("reseed_to");
  TheoremDatabase db2 = base_db();
  LoopState fresh = run_reseed(db2, cfg, dirR.string(), dirN.string());
  CHECK(static_cast<int>(fresh.store.historical.size()) == old_total);
  CHECK(fresh.store.fresh.empty());
  CHECK(fresh.next_round == 0);
  CHECK(fresh.cumulative.empty());
  CHECK(fresh.opt.step == cfg.reseed_train_steps);
  CHECK(state_is_seeded(dirN.string()));
  CHECK(line_count(dirN / "seed" / "store.jsonl") == old_total);
  CHECK(slurp(dirN / "seed" / "logs" / "attempts.jsonl").empty());
  CHECK(slurp(dirN / "seed" / "meta.json").find("reseed") !=
        std::string::npos);
  CHECK(slurp(dirN / "seed" / "checkpoint") !=
        slurp(dirR / "seed" / "checkpoint"));

  // The reseeded state supports normal rounds.
  run_round(db2, cfg, dirN.string(), fresh);
  CHECK(fresh.next_round == 1);
  CHECK(fs::exists(dirN / "round_0" / "stats.csv"));

  SUBCASE("an empty inherited store reduces to a fresh initialization") {
    const fs::path dirE = tmpdir("reseed_empty");
    spit(dirE / "seed" / "checkpoint", "placeholder");
    spit(dirE / "seed" / "store.jsonl", "");
    const fs::path dirE2 = tmpdir("reseed_empty_out");
    TheoremDatabase db3 = base_db();
    LoopState st = run_reseed(db3, cfg, dirE.string(), dirE2.string());
    CHECK(st.store.size() == 0);
    CHECK(st.opt.step == 0);

    const TokenStats stats = compute_token_stats(db3);
    ModelDims dims = cfg.dims;
    dims.vocab = static_cast<int>(stats.vocab.size());
    Rng rng(mix_seed(cfg.seed, "reseed-init"));
    const ModelParams expect = init_params(dims, rng);
    CHECK(st.ckpt.raw.w == expect.w);
    CHECK(st.ckpt.averaged.w == expect.w);
  }
}

TEST_CASE("a zero-goal round only trains") {
  TheoremDatabase db = base_db();
  LoopConfig cfg = small_cfg(13);
  cfg.goals_per_round = 0;
  const fs::path dir = tmpdir("zero_goals");
  LoopState state;
  run_seed(db, SeedVariant::RandomPolicy, cfg, dir.string(), state);
  REQUIRE_FALSE(state.store.historical.empty());

  run_round(db, cfg, dir.string(), state);
  CHECK(state.next_round == 1);
  REQUIRE(state.stats.size() == 1);
  CHECK(state.stats[0].attempted == 0);
  CHECK(state.stats[0].proved == 0);
  CHECK(state.stats[0].proved_pct == doctest::Approx(0.0));
  CHECK(state.opt.step == cfg.train_steps_per_round);
  CHECK(fs::exists(dir / "round_0" / "stats.csv"));
  CHECK(line_count(dir / "round_0" / "logs" / "attempts.jsonl") == 0);
}
