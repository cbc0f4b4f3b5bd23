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

#ifndef ZP_SEARCH_HPP
#define ZP_SEARCH_HPP

#include <string>
#include <vector>

#include "zp/db.hpp"
#include "zp/explore.hpp"
#include "zp/model.hpp"
#include "zp/rng.hpp"
#include "zp/tactics.hpp"

namespace zp {

// How the policy ranks premises: combiner logits (normal operation) or plain
// cosine between tower outputs (shared-tower seed runs).
enum class RankMode { Combiner, Cosine };

enum class NodeStatus { Open, Proved, Abandoned };
const char* node_status_name(NodeStatus s);

struct SearchLimits {
  int max_top_tactics = 4;     // raw sample; clamped to the tactic count at use
  int max_successful_apps = 4;
  int total_params = 16;
  int tactic_step_budget = 100;
  int proof_node_budget = 300;
  double wall_clock_guard_s = 30.0;

  // Draws the three per-attempt fields in declaration order:
  // max_top_tactics ~ U[6,16], max_successful_apps ~ U[3,6],
  // total_params ~ U[1,32].
  static SearchLimits sample(Rng& rng, int step_budget = 100,
                             int node_budget = 300, double guard_s = 30.0);
};

// Per-round inference cache: the averaged parameters plus everything that
// depends only on (premise, checkpoint), so a node expansion touches each
// premise with O(H) work instead of a full tower pass.
struct PremiseCache {
  ModelParams params;
  TokenStats stats;
  std::vector<std::vector<int>> ids;
  std::vector<std::vector<double>> repr;  // premise-tower output
  std::vector<std::vector<double>> part;  // combiner premise part
  std::vector<BowVector> counts;
  std::vector<char> usable;  // rewritable statements only

  static PremiseCache build(const TheoremDatabase& db, const TokenStats& stats,
                            const ModelParams& averaged);
};

struct AppRecord {
  TacticId tactic = TacticId::Refl;
  std::vector<ScoredPremise> params_before;
  std::vector<int> params_after;  // meaningful only when success
  bool success = false;
  TacticOutcome::Kind kind = TacticOutcome::Kind::Failed;
  FailReason reason = FailReason::Error;  // meaningful only when Failed
  std::vector<int> children;              // node ids, first-occurrence order
  bool children_complete = true;          // false when the node budget cut children
  double epsilon = 0.0;
};

struct NodeRecord {
  int id = 0;
  int parent = -1;
  int depth = 0;
  NodeStatus status = NodeStatus::Open;
  Equation goal;  // in-memory only; logs re-derive goals from the database
  std::vector<AppRecord> apps;
};

struct ProofLog {
  int version = 1;
  int goal_index = -1;
  int round = -1;
  uint64_t seed = 0;
  bool proved = false;
  int k2 = 0;  // exploration width drawn for this attempt (0 when unused)
  SearchLimits limits;
  std::vector<NodeRecord> nodes;
};

struct AttemptConfig {
  int goal_index = 0;
  int round = 0;
  double epsilon = 1.0;
  RankMode rank_mode = RankMode::Combiner;
  // Exploration scorer for P2; Baseline and Seeded mean no P2 premises.
  Strategy explore = Strategy::Baseline;
  uint64_t seed = 0;  // recorded in the log, not consumed
};

// Breadth-first AND-OR search. FIFO over open nodes; each expansion ranks
// tactics epsilon-greedily, tries them until the per-node success cap, spawns
// child nodes per successful subgoal (deduplicated per parent), and logs
// every application. With epsilon 0 and no exploration scorer the attempt
// consumes no randomness at all.
ProofLog prove(const AttemptConfig& at, const TheoremDatabase& db,
               const PremiseCache& cache, const ExplorationConfig& cfg,
               const SearchLimits& limits, Rng& rng);

// Single greedy pass from the lowest-ranked parameter to the highest:
// tentatively drop each one and keep the removal when re-application still
// produces a structurally identical outcome. Throws ReplayDivergence when the
// original list no longer reproduces the outcome.
std::vector<int> prune_parameters(const Equation& goal, TacticId tactic,
                                  const std::vector<ScoredPremise>& params,
                                  const TacticOutcome& original,
                                  const TheoremDatabase& db, int step_budget);

// Validates a ProvedRoot log by re-deriving the proved subtree from the
// database entry: re-applies each logged application with its pruned
// parameters and checks outcome kinds, subgoal counts and leaf closure.
bool replay(const ProofLog& log, const TheoremDatabase& db,
            std::string* why = nullptr);

// Reconstructs every node's goal from a goal-free log by re-applying each
// successful application with its pruned parameters; children are recorded
// as a prefix of the distinct subgoal list, so pairing is positional.
// Throws ReplayDivergence when the log does not re-derive cleanly.
std::vector<Equation> derive_node_goals(const ProofLog& log,
                                        const TheoremDatabase& db);

// One JSON object per line; node goals are omitted (re-derivable).
std::string proof_log_to_json(const ProofLog& log);
ProofLog proof_log_from_json(const std::string& line);

}  // namespace zp

#endif  // ZP_SEARCH_HPP
