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

#ifndef ZP_TACTICS_HPP
#define ZP_TACTICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zp/term.hpp"

namespace zp {

enum class TacticId : uint8_t { Refl = 0, Sym = 1, Cong = 2, Rewrite = 3 };
constexpr int kNumTactics = 4;
constexpr int kMaxTacticParams = 32;

const char* tactic_name(TacticId t);
std::optional<TacticId> tactic_from_name(std::string_view name);

enum class FailReason : uint8_t { Timeout = 0, Unchanged = 1, Error = 2 };
const char* fail_reason_name(FailReason r);

struct TacticOutcome {
  enum class Kind : uint8_t { Closed, Subgoals, Failed };
  Kind kind;
  std::vector<Equation> subgoals;  // non-empty iff kind == Subgoals
  FailReason reason = FailReason::Error;

  bool success() const { return kind != Kind::Failed; }
  static TacticOutcome closed() { return {Kind::Closed, {}, FailReason::Error}; }
  static TacticOutcome with_subgoals(std::vector<Equation> sg) {
    return {Kind::Subgoals, std::move(sg), FailReason::Error};
  }
  static TacticOutcome failed(FailReason r) { return {Kind::Failed, {}, r}; }
};

bool outcome_equal(const TacticOutcome& a, const TacticOutcome& b);

// Binding of rule variables to subterms, built up during matching.
using Bindings = std::vector<std::pair<Sym, TermPtr>>;

// First-order matching: pattern variables bind to arbitrary subterms, subject
// variables are rigid. Appends to binds; returns false (and may leave partial
// bindings) when there is no match.
bool match_term(const TermPtr& pattern, const TermPtr& subject, Bindings& binds);

TermPtr substitute(const TermPtr& t, const Bindings& binds);

// One leftmost-outermost rewrite step: scans positions in prefix order and at
// each position tries the rules in the given order. Returns nullptr when no
// rule matches anywhere.
TermPtr rewrite_once(const TermPtr& t, std::span<const Equation> rules);

struct RewriteResult {
  TermPtr term;
  int steps;
  bool reducible;  // true iff a rule still matches after budget ran out
};

// Rewrites until normal form or until `budget` steps were used. Every rule
// must satisfy is_rewritable().
RewriteResult rewrite_normalize(const TermPtr& t, std::span<const Equation> rules,
                                int budget);

// Applies one tactic to a goal equation.
//   Refl    closes syntactically equal sides.
//   Sym     flips the equation unless lhs <= rhs in term order already.
//   Cong    splits an application pair with a common head into child goals.
//   Rewrite normalizes both sides with the parameter equations as rules.
// Only Rewrite takes parameters; at most kMaxTacticParams of them.
TacticOutcome apply_tactic(const Equation& goal, TacticId tactic,
                           std::span<const Equation> params, int step_budget);

}  // namespace zp

#endif  // ZP_TACTICS_HPP
