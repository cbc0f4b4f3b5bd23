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

#include "zp/tactics.hpp"

#include <algorithm>

#include "zp/common.hpp"

namespace zp {

const char* tactic_name(TacticId t) {
  switch (t) {
    case TacticId::Refl: return "REFL";
    case TacticId::Sym: return "SYM";
    case TacticId::Cong: return "CONG";
    case TacticId::Rewrite: return "REWRITE";
  }
  return "?";
}

std::optional<TacticId> tactic_from_name(std::string_view name) {
  if (name == "REFL") return TacticId::Refl;
  if (name == "SYM") return TacticId::Sym;
  if (name == "CONG") return TacticId::Cong;
  if (name == "REWRITE") return TacticId::Rewrite;
  return std::nullopt;
}

const char* fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::Timeout: return "timeout";
    case FailReason::Unchanged: return "unchanged";
    case FailReason::Error: return "error";
  }
  return "?";
}

bool outcome_equal(const TacticOutcome& a, const TacticOutcome& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == TacticOutcome::Kind::Failed) return a.reason == b.reason;
  if (a.kind == TacticOutcome::Kind::Subgoals) {
    if (a.subgoals.size() != b.subgoals.size()) return false;
    for (size_t i = 0; i < a.subgoals.size(); ++i)
      if (!equation_eq(a.subgoals[i], b.subgoals[i])) return false;
  }
  return true;
}

bool match_term(const TermPtr& pattern, const TermPtr& subject, Bindings& binds) {
  if (pattern->kind == TermKind::Var) {
    for (const auto& [v, bound] : binds)
      if (v == pattern->sym) return term_eq(bound, subject);
    binds.emplace_back(pattern->sym, subject);
    return true;
  }
  if (pattern->kind != subject->kind || pattern->sym != subject->sym) return false;
  if (pattern->kids.size() != subject->kids.size()) return false;
  for (size_t i = 0; i < pattern->kids.size(); ++i)
    if (!match_term(pattern->kids[i], subject->kids[i], binds)) return false;
  return true;
}

TermPtr substitute(const TermPtr& t, const Bindings& binds) {
  if (t->kind == TermKind::Var) {
    for (const auto& [v, bound] : binds)
      if (v == t->sym) return bound;
    return t;
  }
  if (t->kind == TermKind::Const) return t;
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  bool changed = false;
  for (const auto& k : t->kids) {
    TermPtr nk = substitute(k, binds);
    changed = changed || nk.get() != k.get();
    kids.push_back(std::move(nk));
  }
  if (!changed) return t;
  return make_app(t->sym, std::move(kids));
}

namespace {

TermPtr rewrite_at_root(const TermPtr& t, std::span<const Equation> rules) {
  for (const auto& rule : rules) {
    Bindings binds;
    if (match_term(rule.lhs, t, binds)) return substitute(rule.rhs, binds);
  }
  return nullptr;
}

}  // namespace

TermPtr rewrite_once(const TermPtr& t, std::span<const Equation> rules) {
  if (TermPtr r = rewrite_at_root(t, rules)) return r;
  if (t->kind != TermKind::App) return nullptr;
  for (size_t i = 0; i < t->kids.size(); ++i) {
    if (TermPtr nk = rewrite_once(t->kids[i], rules)) {
      std::vector<TermPtr> kids = t->kids;
      kids[i] = std::move(nk);
      return make_app(t->sym, std::move(kids));
    }
  }
  return nullptr;
}

RewriteResult rewrite_normalize(const TermPtr& t, std::span<const Equation> rules,
                                int budget) {
  TermPtr cur = t;
  int steps = 0;
  while (steps < budget) {
    TermPtr next = rewrite_once(cur, rules);
    if (!next) return {cur, steps, false};
    cur = std::move(next);
    ++steps;
  }
  bool reducible = rewrite_once(cur, rules) != nullptr;
  return {cur, steps, reducible};
}

TacticOutcome apply_tactic(const Equation& goal, TacticId tactic,
                           std::span<const Equation> params, int step_budget) {
  if (tactic != TacticId::Rewrite && !params.empty())
    return TacticOutcome::failed(FailReason::Error);

  switch (tactic) {
    case TacticId::Refl:
      if (term_eq(goal.lhs, goal.rhs)) return TacticOutcome::closed();
      return TacticOutcome::failed(FailReason::Unchanged);

    case TacticId::Sym:
      if (term_cmp(goal.lhs, goal.rhs) <= 0)
        return TacticOutcome::failed(FailReason::Unchanged);
      return TacticOutcome::with_subgoals({Equation{goal.rhs, goal.lhs}});

    case TacticId::Cong: {
      if (goal.lhs->kind != TermKind::App || goal.rhs->kind != TermKind::App)
        return TacticOutcome::failed(FailReason::Error);
      if (goal.lhs->sym != goal.rhs->sym ||
          goal.lhs->kids.size() != goal.rhs->kids.size())
        return TacticOutcome::failed(FailReason::Error);
      std::vector<Equation> subgoals;
      for (size_t i = 0; i < goal.lhs->kids.size(); ++i) {
        if (!term_eq(goal.lhs->kids[i], goal.rhs->kids[i]))
          subgoals.push_back(Equation{goal.lhs->kids[i], goal.rhs->kids[i]});
      }
      if (subgoals.empty()) return TacticOutcome::closed();
      return TacticOutcome::with_subgoals(std::move(subgoals));
    }

    case TacticId::Rewrite: {
      if (params.empty() || params.size() > static_cast<size_t>(kMaxTacticParams))
        return TacticOutcome::failed(FailReason::Error);
      for (const auto& p : params)
        if (!is_rewritable(p)) return TacticOutcome::failed(FailReason::Error);

      RewriteResult l = rewrite_normalize(goal.lhs, params, step_budget);
      RewriteResult r =
          rewrite_normalize(goal.rhs, params, step_budget - l.steps);
      if (term_eq(l.term, r.term)) return TacticOutcome::closed();
      if (l.reducible || r.reducible)
        return TacticOutcome::failed(FailReason::Timeout);
      if (l.steps == 0 && r.steps == 0)
        return TacticOutcome::failed(FailReason::Unchanged);
      return TacticOutcome::with_subgoals({Equation{l.term, r.term}});
    }
  }
  return TacticOutcome::failed(FailReason::Error);
}

}  // namespace zp
