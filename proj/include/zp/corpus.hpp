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

#ifndef ZP_CORPUS_HPP
#define ZP_CORPUS_HPP

#include <string>
#include <vector>

#include "zp/db.hpp"
#include "zp/term.hpp"

namespace zp {

struct CorpusConfig {
  int n_base_axioms = 32;  // must be 4 per family
  int n_theorems = 1000;
  int max_term_depth = 5;
  // Expected signature as (symbol, arity) pairs. Empty means "accept the
  // generated one"; non-empty is validated against it after generation.
  std::vector<std::pair<std::string, int>> signature;
  double val_fraction = 0.2;
  uint64_t rng_seed = 0;
};

// Goal difficulty classes the generator plants deliberately.
//   Refl    (= t t), closable by REFL alone.
//   Rewrite random term vs an equal term, closable by family axioms within
//           the step budget.
//   Lemma   a deep g-chain collapse whose axiom distance exceeds the step
//           budget; provable only by replay with an enlarged budget.
//   Instance a ground instance of an earlier lemma; in-budget closable only
//           when that lemma itself is passed as a rewrite rule.
enum class GoalKind : uint8_t { Axiom = 0, Refl, Rewrite, Lemma, Instance };
const char* goal_kind_name(GoalKind k);

struct AuditEntry {
  GoalKind kind;
  int family;                 // -1 for none
  std::vector<int> premises;  // indices sufficient to replay the proof
  int replay_budget;          // step budget that makes REWRITE close it
};

// Generates the ordered synthetic database. Entries 0..n_base_axioms-1 are
// the family axioms; later entries are planted goals of the kinds above, all
// verified at generation time (replay with the recorded premises closes
// them, and Lemma/Instance hardness bounds are checked mechanically).
// If audit is non-null it receives one entry per theorem.
TheoremDatabase generate_corpus(const CorpusConfig& config,
                                std::vector<AuditEntry>* audit = nullptr);

struct TokenStats {
  std::vector<std::string> vocab;  // sorted
  std::vector<int> doc_freq;
  std::vector<double> corpus_freq;
  std::vector<double> idf;
  int n_docs = 0;

  int token_id(const std::string& tok) const;  // -1 when absent
};

TokenStats compute_token_stats(const TheoremDatabase& db);

std::string stats_to_csv(const TokenStats& stats);

}  // namespace zp

#endif  // ZP_CORPUS_HPP
