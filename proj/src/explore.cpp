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

#include "zp/explore.hpp"

#include <algorithm>
#include <cmath>

#include "zp/common.hpp"

namespace zp {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Baseline: return "baseline";
    case Strategy::Seeded: return "seeded";
    case Strategy::PET: return "pet";
    case Strategy::BoW1: return "bow1";
    case Strategy::BoW2: return "bow2";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::Baseline, Strategy::Seeded, Strategy::PET,
                     Strategy::BoW1, Strategy::BoW2}) {
    if (name == strategy_name(s)) return s;
  }
  throw ConfigError("unknown strategy '" + name +
                    "' (expected baseline, seeded, pet, bow1 or bow2)");
}

double cosine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeMismatch("cosine: length mismatch");
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

BowVector bow_vector(const Equation& eq, const SymbolTable& syms,
                     const TokenStats& stats) {
  std::vector<int> ids;
  for (const std::string& tok : tokenize(eq, syms)) {
    int id = stats.token_id(tok);
    if (id >= 0) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  BowVector out;
  for (size_t i = 0; i < ids.size();) {
    size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    out.emplace_back(ids[i], static_cast<int>(j - i));
    i = j;
  }
  return out;
}

namespace {

void sort_ranked(std::vector<ScoredPremise>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const ScoredPremise& a, const ScoredPremise& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.index < b.index;
                   });
}

// Cosine between two reweighted sparse count vectors under a shared dense
// per-token weight vector.
double weighted_cosine(const BowVector& a, const BowVector& b,
                       const std::vector<double>& weight) {
  double na = 0.0, nb = 0.0, dot = 0.0;
  for (const auto& [id, count] : a) {
    const double v = weight[id] * count;
    na += v * v;
  }
  for (const auto& [id, count] : b) {
    const double v = weight[id] * count;
    nb += v * v;
  }
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      const double w = weight[a[i].first];
      dot += (w * a[i].second) * (w * b[j].second);
      ++i;
      ++j;
    }
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<ScoredPremise> bow_rank(const TokenStats& stats,
                                    const BowVector& goal,
                                    const std::vector<BowVector>& prems,
                                    const std::vector<int>& pool,
                                    const std::vector<double>& weight) {
  if (prems.size() != pool.size()) {
    throw ShapeMismatch("bow ranking: pool size mismatch");
  }
  (void)stats;
  std::vector<ScoredPremise> out(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    out[i] = {pool[i], weighted_cosine(goal, prems[i], weight),
              PremiseSource::Explore};
  }
  sort_ranked(out);
  return out;
}

}  // namespace

std::vector<ScoredPremise> pet_select_from_reprs(
    const std::vector<double>& goal_repr,
    const std::vector<std::vector<double>>& reprs, const std::vector<int>& pool,
    int k2, int k2_prime, double sigma, Rng& rng) {
  if (reprs.size() != pool.size()) {
    throw ShapeMismatch("pet_select: pool size mismatch");
  }
  std::vector<ScoredPremise> ranked(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    ranked[i] = {pool[i], cosine(goal_repr, reprs[i]), PremiseSource::Explore};
  }
  sort_ranked(ranked);
  if (static_cast<int>(ranked.size()) > k2_prime) ranked.resize(k2_prime);
  for (ScoredPremise& sp : ranked) {
    sp.score += rng.next_normal(0.0, sigma);
  }
  sort_ranked(ranked);
  if (static_cast<int>(ranked.size()) > k2) ranked.resize(k2);
  return ranked;
}

std::vector<ScoredPremise> pet_select(const ModelParams& averaged,
                                      const SymbolTable& syms,
                                      const TokenStats& stats,
                                      const Equation& goal,
                                      const TheoremDatabase& db, int prefix,
                                      int k2, int k2_prime, double sigma,
                                      Rng& rng) {
  std::vector<double> goal_repr =
      embed_premise(averaged, token_ids(goal, syms, stats));
  std::vector<int> pool;
  std::vector<std::vector<double>> reprs;
  for (int i = 0; i < prefix; ++i) {
    pool.push_back(i);
    reprs.push_back(
        embed_premise(averaged, token_ids(db.entry(i).stmt, syms, stats)));
  }
  return pet_select_from_reprs(goal_repr, reprs, pool, k2, k2_prime, sigma,
                               rng);
}

std::vector<ScoredPremise> bow1_scores_from_counts(
    const TokenStats& stats, const BowVector& goal,
    const std::vector<BowVector>& prems, const std::vector<int>& pool,
    Rng& rng) {
  std::vector<double> weight(stats.vocab.size());
  for (size_t v = 0; v < stats.vocab.size(); ++v) {
    weight[v] = rng.next_lognormal() * stats.idf[v];
  }
  return bow_rank(stats, goal, prems, pool, weight);
}

std::vector<ScoredPremise> bow2_scores_from_counts(
    const TokenStats& stats, const BowVector& goal,
    const std::vector<BowVector>& prems, const std::vector<int>& pool,
    Rng& rng) {
  std::vector<double> weight(stats.vocab.size());
  for (size_t v = 0; v < stats.vocab.size(); ++v) {
    weight[v] =
        std::abs(1.0 + rng.next_normal(0.0, 1.0)) / stats.corpus_freq[v];
  }
  return bow_rank(stats, goal, prems, pool, weight);
}

namespace {

std::vector<ScoredPremise> bow_wrap(
    const TokenStats& stats, const SymbolTable& syms, const Equation& goal,
    const TheoremDatabase& db, int prefix, Rng& rng,
    std::vector<ScoredPremise> (*core)(const TokenStats&, const BowVector&,
                                       const std::vector<BowVector>&,
                                       const std::vector<int>&, Rng&)) {
  BowVector g = bow_vector(goal, syms, stats);
  std::vector<int> pool;
  std::vector<BowVector> prems;
  for (int i = 0; i < prefix; ++i) {
    pool.push_back(i);
    prems.push_back(bow_vector(db.entry(i).stmt, syms, stats));
  }
  return core(stats, g, prems, pool, rng);
}

}  // namespace

std::vector<ScoredPremise> bow1_scores(const TokenStats& stats,
                                       const SymbolTable& syms,
                                       const Equation& goal,
                                       const TheoremDatabase& db, int prefix,
                                       Rng& rng) {
  return bow_wrap(stats, syms, goal, db, prefix, rng, bow1_scores_from_counts);
}

std::vector<ScoredPremise> bow2_scores(const TokenStats& stats,
                                       const SymbolTable& syms,
                                       const Equation& goal,
                                       const TheoremDatabase& db, int prefix,
                                       Rng& rng) {
  return bow_wrap(stats, syms, goal, db, prefix, rng, bow2_scores_from_counts);
}

std::vector<ScoredPremise> select_parameters(
    const std::vector<ScoredPremise>& policy_ranked,
    const std::vector<ScoredPremise>& explore_ranked, int k1, int k2,
    int cap) {
  std::vector<ScoredPremise> out;
  std::vector<int> seen;
  const int n1 = std::min<int>(k1, policy_ranked.size());
  for (int i = 0; i < n1; ++i) {
    ScoredPremise sp = policy_ranked[i];
    sp.source = PremiseSource::Policy;
    if (std::find(seen.begin(), seen.end(), sp.index) == seen.end()) {
      seen.push_back(sp.index);
      out.push_back(sp);
    }
  }
  const int n2 = std::min<int>(k2, explore_ranked.size());
  for (int i = 0; i < n2; ++i) {
    ScoredPremise sp = explore_ranked[i];
    sp.source = PremiseSource::Explore;
    if (std::find(seen.begin(), seen.end(), sp.index) == seen.end()) {
      seen.push_back(sp.index);
      out.push_back(sp);
    }
  }
  if (static_cast<int>(out.size()) > cap) out.resize(cap);
  return out;
}

double epsilon_schedule(int round, const ExplorationConfig& cfg) {
  if (round < 0) throw ConfigError("epsilon_schedule: negative round");
  // Exact floor at the boundary; the interpolation lands one ulp off it.
  if (round >= cfg.epsilon_anneal_rounds) return cfg.epsilon_floor;
  const double slope = (1.0 - cfg.epsilon_floor) /
                       static_cast<double>(cfg.epsilon_anneal_rounds);
  return std::max(cfg.epsilon_floor, 1.0 - round * slope);
}

std::vector<TacticId> select_tactics(const std::vector<double>& logits,
                                     double epsilon, int max_tactics,
                                     Rng& rng) {
  const int n = static_cast<int>(logits.size());
  std::vector<int> remaining(n);
  for (int i = 0; i < n; ++i) remaining[i] = i;
  std::vector<TacticId> out;
  const int slots = std::min(max_tactics, n);
  for (int s = 0; s < slots; ++s) {
    size_t pick;
    if (epsilon > 0.0 && rng.next_double() < epsilon) {
      pick = rng.next_below(remaining.size());
    } else {
      pick = 0;
      for (size_t i = 1; i < remaining.size(); ++i) {
        if (logits[remaining[i]] > logits[remaining[pick]]) pick = i;
      }
    }
    out.push_back(static_cast<TacticId>(remaining[pick]));
    remaining.erase(remaining.begin() + pick);
  }
  return out;
}

}  // namespace zp
