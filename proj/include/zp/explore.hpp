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

#ifndef ZP_EXPLORE_HPP
#define ZP_EXPLORE_HPP

#include <string>
#include <utility>
#include <vector>

#include "zp/db.hpp"
#include "zp/model.hpp"
#include "zp/rng.hpp"
#include "zp/tactics.hpp"

namespace zp {

enum class Strategy { Baseline, Seeded, PET, BoW1, BoW2 };
const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);  // ConfigError on unknown

enum class PremiseSource { Policy, Explore };

struct ScoredPremise {
  int index = -1;
  double score = 0.0;
  PremiseSource source = PremiseSource::Explore;
};

struct ExplorationConfig {
  Strategy strategy = Strategy::Baseline;
  int k1 = 16;
  int k2_min = 6;
  int k2_max = 16;
  int pet_prefilter = 100;  // k2'
  double pet_noise_sigma = 0.2;
  int param_cap = 32;
  double epsilon_floor = 0.1;
  int epsilon_anneal_rounds = 20;
};

// Zero vectors score 0 by convention.
double cosine(const std::vector<double>& x, const std::vector<double>& y);

// Sparse token-count vector of a statement, (token id, count) sorted by id.
// Out-of-vocabulary tokens are dropped.
using BowVector = std::vector<std::pair<int, int>>;
BowVector bow_vector(const Equation& eq, const SymbolTable& syms,
                     const TokenStats& stats);

// PET over precomputed premise-tower representations. pool[i] is the theorem
// index scored by reprs[i]. Prefilters to the top k2_prime by cosine, then
// perturbs those scores with Normal(0, sigma) noise drawn in rank order and
// keeps the top k2. Ties always break toward the smaller theorem index.
std::vector<ScoredPremise> pet_select_from_reprs(
    const std::vector<double>& goal_repr,
    const std::vector<std::vector<double>>& reprs, const std::vector<int>& pool,
    int k2, int k2_prime, double sigma, Rng& rng);

// Convenience form that embeds everything with the averaged premise tower.
std::vector<ScoredPremise> pet_select(const ModelParams& averaged,
                                      const SymbolTable& syms,
                                      const TokenStats& stats,
                                      const Equation& goal,
                                      const TheoremDatabase& db, int prefix,
                                      int k2, int k2_prime, double sigma,
                                      Rng& rng);

// Randomized bag-of-words rankings over the whole pool, descending. One noise
// value is drawn per vocabulary token per invocation, in token id order;
// premises are scored by the cosine between the reweighted count vectors of
// the goal and the premise.
//   bow1 weight: nu * idf,        nu ~ LogNormal(0, 1)
//   bow2 weight: |1 + nu| / freq, nu ~ Normal(0, 1)
std::vector<ScoredPremise> bow1_scores_from_counts(
    const TokenStats& stats, const BowVector& goal,
    const std::vector<BowVector>& prems, const std::vector<int>& pool,
    Rng& rng);
std::vector<ScoredPremise> bow2_scores_from_counts(
    const TokenStats& stats, const BowVector& goal,
    const std::vector<BowVector>& prems, const std::vector<int>& pool,
    Rng& rng);

std::vector<ScoredPremise> bow1_scores(const TokenStats& stats,
                                       const SymbolTable& syms,
                                       const Equation& goal,
                                       const TheoremDatabase& db, int prefix,
                                       Rng& rng);
std::vector<ScoredPremise> bow2_scores(const TokenStats& stats,
                                       const SymbolTable& syms,
                                       const Equation& goal,
                                       const TheoremDatabase& db, int prefix,
                                       Rng& rng);

// P1 = first k1 of policy_ranked, P2 = first k2 of explore_ranked; result is
// P1 followed by the P2 remainder, deduplicated by index with the policy
// entry winning, truncated to cap.
std::vector<ScoredPremise> select_parameters(
    const std::vector<ScoredPremise>& policy_ranked,
    const std::vector<ScoredPremise>& explore_ranked, int k1, int k2, int cap);

// Linear decay from 1 at round 0 to the floor at epsilon_anneal_rounds.
double epsilon_schedule(int round, const ExplorationConfig& cfg);

// Epsilon-greedy ordering of distinct tactics. Each slot is uniform over the
// not-yet-chosen tactics with probability epsilon, otherwise the best
// remaining logit (ties toward the smaller tactic id). epsilon <= 0 draws
// nothing from the RNG, which keeps evaluation runs RNG-free.
std::vector<TacticId> select_tactics(const std::vector<double>& logits,
                                     double epsilon, int max_tactics, Rng& rng);

}  // namespace zp

#endif  // ZP_EXPLORE_HPP
