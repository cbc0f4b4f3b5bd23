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

#ifndef ZP_LOOP_HPP
#define ZP_LOOP_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zp/corpus.hpp"
#include "zp/db.hpp"
#include "zp/explore.hpp"
#include "zp/model.hpp"
#include "zp/search.hpp"

namespace zp {

enum class ExampleOrigin : uint8_t { Pruning = 0, FailedApplication = 1 };
const char* example_origin_name(ExampleOrigin o);

enum class SeedVariant : uint8_t { RandomPolicy = 0, SharedTowerCosine = 1 };
const char* seed_variant_name(SeedVariant v);
std::optional<SeedVariant> seed_variant_from_name(std::string_view s);

// One supervision record. goal is the (sub)goal the application ran on;
// goal_index is the root theorem's database index and bounds every premise
// index. tactic -1 means the example trains only the ranking head.
struct TrainingExample {
  Equation goal;
  int goal_index = -1;
  int tactic = -1;
  std::vector<int> positives;
  std::vector<int> negatives;
  ExampleOrigin origin = ExampleOrigin::Pruning;
  int round = -1;  // -1 for seed-run examples
};

std::string example_to_json(const TrainingExample& ex,
                            const SymbolTable& syms);
TrainingExample example_from_json(const std::string& line, SymbolTable& syms);

struct ExampleStore {
  std::vector<TrainingExample> fresh;
  std::vector<TrainingExample> historical;

  size_t size() const { return fresh.size() + historical.size(); }
  // End-of-round rotation: fresh is appended to historical and cleared.
  void rotate();
};

// One example per successful application at a Proved node: positives are the
// pruned parameters, negatives the pruned-away ones, tactic the label.
std::vector<TrainingExample> extract_examples(const ProofLog& log, int round);

// Failure negative mining. Applications are keyed by the canonical form of
// their subgoal plus the tactic id; a key's first Closed application fixes
// the successful parameter set, and failed parameter sets recorded for that
// key are emitted as negatives once both sides of the pair exist.
struct FailureIndex {
  struct Closure {
    std::vector<int> params;  // sorted successful set
    int round = 0;
  };
  struct FailureRec {
    Equation goal;
    int goal_index = -1;
    std::vector<int> params;  // sorted failed set
    int round = 0;
  };
  std::map<std::string, Closure> closures;
  std::map<std::string, std::vector<FailureRec>> failures;
};

void record_for_mining(FailureIndex& idx, const ProofLog& log,
                       const SymbolTable& syms, int round);

// Emits the negatives whose (failure, closure) pair completes at `round`:
// emission round = max(failure round, closure round, 0). Negatives are the
// failed set minus the successful set; pairs with an identical set or an
// empty difference emit nothing.
std::vector<TrainingExample> mine_failure_negatives(const FailureIndex& idx,
                                                    int round);

// Draws a training batch: n_fresh from the fresh pool then n_hist from the
// historical pool, uniformly with replacement; an empty pool's share falls
// back to the other pool. Returns the resolved batch and how many came from
// fresh.
std::pair<std::vector<ResolvedExample>, int> sample_batch(
    const ExampleStore& store, const TheoremDatabase& db,
    const TokenStats& stats, int n_fresh, int n_hist, Rng& rng);

struct StatsRow {
  int round = 0;
  int attempted = 0;
  int proved = 0;
  double proved_pct = 0.0;
  int cumulative_proved = 0;
  double cumulative_pct = 0.0;
  double val_proved_pct = -1.0;  // < 0 renders as a blank field
  double epsilon = 0.0;
  std::string strategy;
};

std::string stats_csv_header();
std::string stats_row_csv(const StatsRow& r);
std::vector<StatsRow> parse_stats_csv(const std::string& text);

struct EvalReport {
  int attempted = 0;
  int proved = 0;
  std::vector<int> proved_indices;
};

struct LoopConfig {
  Strategy strategy = Strategy::BoW2;
  int rounds = 30;
  int goals_per_round = 200;
  int train_steps_per_round = 500;
  int batch_fresh = 5;
  int batch_historical = 11;
  int eval_every = 10;  // evaluate when (round + 1) % eval_every == 0
  int reseed_train_steps = 2000;
  bool extra_negatives = false;
  bool train_on_val = false;
  int workers = 1;
  uint64_t seed = 0;
  ModelDims dims;  // vocab is filled from the database at seed time
  ExplorationConfig explore;
  SearchLimits eval_limits;
};

struct LoopState {
  int next_round = 0;
  ExampleStore store;
  RankingCheckpoint ckpt;
  OptimizerState opt;
  std::set<int> cumulative;
  std::vector<StatsRow> stats;
  FailureIndex mining;
};

// Runs every attempt and returns the logs in the order of `attempts`.
// Per-attempt limits are sampled from Rng(at.seed) unless fixed_limits is
// given; the same rng then drives the attempt. workers 1 takes a plain
// serial loop, larger values the OpenMP path; outputs are identical.
std::vector<ProofLog> prove_goals(const TheoremDatabase& db,
                                  const PremiseCache& cache,
                                  const ExplorationConfig& ecfg,
                                  const std::vector<AttemptConfig>& attempts,
                                  const SearchLimits* fixed_limits,
                                  int workers);

// Pure-policy evaluation of a split: epsilon 0, no exploration premises,
// fixed limits, consumes no randomness.
EvalReport evaluate(const TheoremDatabase& db, const RankingCheckpoint& ckpt,
                    Split split, const SearchLimits& limits, int workers);

struct SeedOutcome {
  int attempted = 0;
  int proved = 0;
};

// One epsilon-1 proving pass over the training split with a fresh model,
// extracted straight into state.store.historical; persists state/seed/.
SeedOutcome run_seed(TheoremDatabase& db, SeedVariant variant,
                     const LoopConfig& cfg, const std::string& state_dir,
                     LoopState& state);

// Proves, extracts, trains and persists round state.next_round, then
// advances it. Throws NonFiniteLoss without touching the round directory.
void run_round(TheoremDatabase& db, const LoopConfig& cfg,
               const std::string& state_dir, LoopState& state);

// Rebuilds a LoopState from a state directory: seed store plus all complete
// round deltas, checkpoint/optimizer of the last complete round, cumulative
// set and mining index replayed from the stored logs.
LoopState load_state(TheoremDatabase& db, const LoopConfig& cfg,
                     const std::string& state_dir);

// Fresh model, inherited examples: historical = everything in from_dir's
// store, then cfg.reseed_train_steps training steps before round 0. The new
// state's seed directory is written under state_dir.
LoopState run_reseed(TheoremDatabase& db, const LoopConfig& cfg,
                     const std::string& from_dir,
                     const std::string& state_dir);

bool state_is_seeded(const std::string& state_dir);

}  // namespace zp

#endif  // ZP_LOOP_HPP
