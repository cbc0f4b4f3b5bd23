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

#include "zp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "zp/common.hpp"
#include "zp/rng.hpp"
#include "zp/tactics.hpp"

namespace zp {

const char* goal_kind_name(GoalKind k) {
  switch (k) {
    case GoalKind::Axiom: return "axiom";
    case GoalKind::Refl: return "refl";
    case GoalKind::Rewrite: return "rw";
    case GoalKind::Lemma: return "lemma";
    case GoalKind::Instance: return "inst";
  }
  return "?";
}

namespace {

constexpr int kStepBudget = 100;  // the loop's tactic step budget
constexpr int kMaxRetries = 200;

struct Family {
  Sym m, g, e, a, b, c;
  Sym var_x;
  std::vector<Equation> axioms;       // assoc, lid, rid, ginv
  std::vector<int> axiom_indices;
  std::vector<TermPtr> sigma_pool;    // ground normal forms for instances
};

struct PlacedLemma {
  int db_index;
  int family;
  TermPtr pattern;  // lhs with the single variable x
  TermPtr rhs;      // the variable x
  uint32_t sigma_used = 0;
};

Family make_family(int f, SymbolTable& st) {
  Family fam;
  std::string s = std::to_string(f);
  fam.m = st.intern_with_arity("m" + s, 2);
  fam.g = st.intern_with_arity("g" + s, 1);
  fam.e = st.intern_with_arity("e" + s, 0);
  fam.a = st.intern_with_arity("a" + s, 0);
  fam.b = st.intern_with_arity("b" + s, 0);
  fam.c = st.intern_with_arity("c" + s, 0);
  fam.var_x = st.intern("x");
  Sym y = st.intern("y"), z = st.intern("z");
  TermPtr vx = make_var(fam.var_x), vy = make_var(y), vz = make_var(z);
  auto M = [&](TermPtr l, TermPtr r) { return make_app(fam.m, {l, r}); };
  auto G = [&](TermPtr t) { return make_app(fam.g, {t}); };
  TermPtr e = make_const(fam.e);
  fam.axioms.push_back({M(M(vx, vy), vz), M(vx, M(vy, vz))});
  fam.axioms.push_back({M(e, vx), vx});
  fam.axioms.push_back({M(vx, e), vx});
  fam.axioms.push_back({G(G(vx)), vx});
  for (Sym cst : {fam.a, fam.b, fam.c}) {
    fam.sigma_pool.push_back(make_const(cst));
  }
  for (Sym cst : {fam.a, fam.b, fam.c}) {
    fam.sigma_pool.push_back(G(make_const(cst)));
  }
  return fam;
}

TermPtr random_family_term(Rng& rng, const Family& fam, SymbolTable& st,
                           int depth) {
  if (depth <= 0 || rng.next_below(3) == 0) {
    switch (rng.next_below(7)) {
      case 0: return make_var(st.intern("x"));
      case 1: return make_var(st.intern("y"));
      case 2: return make_var(st.intern("z"));
      case 3: return make_const(fam.a);
      case 4: return make_const(fam.b);
      case 5: return make_const(fam.c);
      default: return make_const(fam.e);
    }
  }
  if (rng.next_below(3) < 2) {
    TermPtr l = random_family_term(rng, fam, st, depth - 1);
    TermPtr r = random_family_term(rng, fam, st, depth - 1);
    return make_app(fam.m, {std::move(l), std::move(r)});
  }
  return make_app(fam.g, {random_family_term(rng, fam, st, depth - 1)});
}

TermPtr subterm_at(const TermPtr& t, int pos, int& idx) {
  if (idx == pos) return t;
  ++idx;
  for (const auto& k : t->kids) {
    if (TermPtr r = subterm_at(k, pos, idx)) return r;
  }
  return nullptr;
}

TermPtr replace_at(const TermPtr& t, int pos, int& idx, const TermPtr& repl) {
  if (idx == pos) return repl;
  ++idx;
  if (t->kids.empty()) return t;
  std::vector<TermPtr> kids = t->kids;
  for (auto& k : kids) {
    int before = idx;
    TermPtr r = replace_at(k, pos, idx, repl);
    if (r.get() != k.get()) {
      k = r;
      return make_app(t->sym, std::move(kids));
    }
    (void)before;
  }
  return t;
}

// One reverse rewrite step: wraps a random subterm with an identity or
// involution pattern, or un-associates a matching m-node.
TermPtr expand_once(const TermPtr& t, const Family& fam, Rng& rng) {
  int pos = static_cast<int>(rng.next_below(t->size));
  int idx = 0;
  TermPtr node = subterm_at(t, pos, idx);
  auto M = [&](TermPtr l, TermPtr r) { return make_app(fam.m, {l, r}); };
  bool assoc_ok = node->kind == TermKind::App && node->sym == fam.m &&
                  node->kids[1]->kind == TermKind::App &&
                  node->kids[1]->sym == fam.m;
  TermPtr repl;
  switch (rng.next_below(assoc_ok ? 4 : 3)) {
    case 0: repl = M(make_const(fam.e), node); break;
    case 1: repl = M(node, make_const(fam.e)); break;
    case 2: repl = make_app(fam.g, {make_app(fam.g, {node})}); break;
    default:
      repl = M(M(node->kids[0], node->kids[1]->kids[0]),
               node->kids[1]->kids[1]);
      break;
  }
  idx = 0;
  return replace_at(t, pos, idx, repl);
}

TermPtr g_chain(const Family& fam, TermPtr base, int n) {
  TermPtr t = std::move(base);
  for (int i = 0; i < n; ++i) t = make_app(fam.g, {t});
  return t;
}

}  // namespace

TheoremDatabase generate_corpus(const CorpusConfig& cfg,
                                std::vector<AuditEntry>* audit) {
  if (cfg.n_base_axioms < 4 || cfg.n_base_axioms % 4 != 0)
    throw ConfigError("n_base_axioms must be a positive multiple of 4");
  if (cfg.n_theorems < cfg.n_base_axioms)
    throw ConfigError("n_theorems must be >= n_base_axioms");
  if (cfg.val_fraction < 0.0 || cfg.val_fraction >= 1.0)
    throw ConfigError("val_fraction must be in [0, 1)");
  if (cfg.max_term_depth < 2) throw ConfigError("max_term_depth must be >= 2");

  TheoremDatabase db;
  SymbolTable& st = db.symbols();
  const int n_families = cfg.n_base_axioms / 4;
  const int n_val = static_cast<int>(cfg.val_fraction * cfg.n_theorems);
  std::vector<Family> fams;
  for (int f = 0; f < n_families; ++f) fams.push_back(make_family(f, st));

  if (audit) audit->clear();
  std::set<std::string> canon;
  auto split_of = [&](int i) {
    return i >= cfg.n_theorems - n_val ? Split::Val : Split::Train;
  };
  auto push = [&](const std::string& name, const Equation& eq, int i,
                  GoalKind kind, int family, std::vector<int> premises,
                  int budget) {
    canon.insert(canonical_form(eq, st));
    db.add(name, eq, split_of(i));
    if (audit)
      audit->push_back(AuditEntry{kind, family, std::move(premises), budget});
  };

  static const char* kAxiomNames[4] = {"assoc", "lid", "rid", "ginv"};
  for (int f = 0; f < n_families; ++f) {
    for (int a = 0; a < 4; ++a) {
      int i = db.size();
      fams[f].axiom_indices.push_back(i);
      push("ax" + std::to_string(f) + "_" + kAxiomNames[a], fams[f].axioms[a],
           i, GoalKind::Axiom, f, {}, 0);
    }
  }

  const int n_derived = cfg.n_theorems - cfg.n_base_axioms;
  const int n_lemmas = std::min(3 * n_families, n_derived / 12);
  std::map<int, int> lemma_slot;  // db index -> lemma ordinal
  for (int k = 0; k < n_lemmas; ++k) {
    int pos = cfg.n_base_axioms +
              static_cast<int>((k + 0.5) * 0.35 * n_derived / n_lemmas);
    lemma_slot[pos] = k;
  }
  if (static_cast<int>(lemma_slot.size()) != n_lemmas)
    throw ConfigError("corpus too small to place distinct lemma slots");
  std::vector<PlacedLemma> lemmas;

  for (int i = cfg.n_base_axioms; i < cfg.n_theorems; ++i) {
    Rng rng(mix_seed(cfg.rng_seed, "entry", static_cast<uint64_t>(i)));
    auto slot = lemma_slot.find(i);
    if (slot != lemma_slot.end()) {
      int k = slot->second;
      int f = k % n_families;
      int o = k / n_families;
      const Family& fam = fams[f];
      int cj = 25 + 7 * o, ck = 82 - 5 * o;
      TermPtr pattern =
          make_app(fam.m, {g_chain(fam, make_var(fam.var_x), 2 * cj),
                           g_chain(fam, make_const(fam.e), 2 * ck)});
      TermPtr rhs = make_var(fam.var_x);
      Equation lemma{pattern, rhs};
      RewriteResult nf = rewrite_normalize(pattern, fam.axioms, 400);
      if (!term_eq(nf.term, rhs) || nf.steps != cj + ck + 1)
        throw Error("lemma normalization shape violated");
      auto hard = apply_tactic(lemma, TacticId::Rewrite, fam.axioms, kStepBudget);
      if (hard.kind != TacticOutcome::Kind::Failed ||
          hard.reason != FailReason::Timeout)
        throw Error("lemma is not out of budget");
      if (canon.count(canonical_form(lemma, st)))
        throw Error("duplicate lemma statement");
      lemmas.push_back(PlacedLemma{i, f, pattern, rhs, 0});
      push("lem" + std::to_string(f) + "_" + std::to_string(o), lemma, i,
           GoalKind::Lemma, f, fam.axiom_indices, cj + ck + 9);
      continue;
    }

    double u = rng.next_double();
    bool want_refl = u < 0.04;
    bool want_inst = !want_refl && u < 0.16;

    bool done = false;
    for (int attempt = 0; attempt < kMaxRetries && !done; ++attempt) {
      if (want_inst) {
        // Available (lemma, sigma) combinations: lemma placed, still unused.
        std::vector<std::pair<int, int>> combos;
        for (size_t L = 0; L < lemmas.size(); ++L) {
          for (int s6 = 0; s6 < 6; ++s6)
            if (!(lemmas[L].sigma_used & (1u << s6)))
              combos.emplace_back(static_cast<int>(L), s6);
        }
        if (combos.empty()) {
          want_inst = false;
        } else {
          auto [L, s6] = combos[rng.next_below(combos.size())];
          PlacedLemma& pl = lemmas[L];
          const Family& fam = fams[pl.family];
          Bindings binds{{fam.var_x, fam.sigma_pool[s6]}};
          Equation goal{substitute(pl.pattern, binds),
                        substitute(pl.rhs, binds)};
          pl.sigma_used |= 1u << s6;
          if (canon.count(canonical_form(goal, st))) continue;
          auto without =
              apply_tactic(goal, TacticId::Rewrite, fam.axioms, kStepBudget);
          std::vector<Equation> with_first{Equation{pl.pattern, pl.rhs}};
          with_first.insert(with_first.end(), fam.axioms.begin(),
                            fam.axioms.end());
          std::vector<Equation> with_last = fam.axioms;
          with_last.push_back(Equation{pl.pattern, pl.rhs});
          auto c1 =
              apply_tactic(goal, TacticId::Rewrite, with_first, kStepBudget);
          auto c2 =
              apply_tactic(goal, TacticId::Rewrite, with_last, kStepBudget);
          if (without.kind != TacticOutcome::Kind::Failed ||
              without.reason != FailReason::Timeout ||
              c1.kind != TacticOutcome::Kind::Closed ||
              c2.kind != TacticOutcome::Kind::Closed)
            throw Error("instance hardness invariant violated");
          std::vector<int> prem = fam.axiom_indices;
          prem.push_back(pl.db_index);
          push("thm" + std::to_string(i) + "_inst", goal, i, GoalKind::Instance,
               pl.family, std::move(prem), kStepBudget);
          done = true;
          continue;
        }
      }
      if (want_refl) {
        const Family& fam = fams[rng.next_below(n_families)];
        TermPtr t = random_family_term(rng, fam, st, 3);
        Equation eq{t, t};
        if (canon.count(canonical_form(eq, st))) continue;
        push("thm" + std::to_string(i) + "_refl", eq, i, GoalKind::Refl, -1, {},
             0);
        done = true;
      } else {
        int f = static_cast<int>(rng.next_below(n_families));
        const Family& fam = fams[f];
        TermPtr t = random_family_term(rng, fam, st, cfg.max_term_depth);
        RewriteResult nf = rewrite_normalize(t, fam.axioms, kStepBudget);
        if (nf.steps < 1 || nf.steps > 60 || nf.reducible) continue;
        TermPtr u_term = nf.term;
        int n_exp = rng.next_int(0, 6);
        for (int e = 0; e < n_exp; ++e) u_term = expand_once(u_term, fam, rng);
        Equation eq{t, u_term};
        if (term_eq(t, u_term)) continue;
        if (canon.count(canonical_form(eq, st))) continue;
        if (apply_tactic(eq, TacticId::Rewrite, fam.axioms, kStepBudget).kind !=
            TacticOutcome::Kind::Closed)
          continue;
        push("thm" + std::to_string(i) + "_rw", eq, i, GoalKind::Rewrite, f,
             fam.axiom_indices, kStepBudget);
        done = true;
      }
    }
    if (!done)
      throw ConfigError("could not generate a distinct statement for entry " +
                        std::to_string(i) + "; corpus constraints too tight");
  }

  if (!cfg.signature.empty()) {
    std::vector<std::pair<std::string, int>> sig;
    for (Sym s = 0; s < st.size(); ++s) {
      if (!is_var_name(st.name(s)) && st.name(s) != "=")
        sig.emplace_back(st.name(s), st.arity(s));
    }
    std::sort(sig.begin(), sig.end());
    std::vector<std::pair<std::string, int>> want = cfg.signature;
    std::sort(want.begin(), want.end());
    if (sig != want) throw ConfigError("generated signature differs from the configured one");
  }
  return db;
}

int TokenStats::token_id(const std::string& tok) const {
  auto it = std::lower_bound(vocab.begin(), vocab.end(), tok);
  if (it == vocab.end() || *it != tok) return -1;
  return static_cast<int>(it - vocab.begin());
}

TokenStats compute_token_stats(const TheoremDatabase& db) {
  if (db.size() == 0) throw ConfigError("token stats need a non-empty database");
  TokenStats stats;
  stats.n_docs = db.size();
  std::map<std::string, int> doc_count;
  std::map<std::string, long long> occ_count;
  long long total = 0;
  for (const auto& e : db.entries()) {
    std::vector<std::string> toks = tokenize(e.stmt, db.symbols());
    std::set<std::string> uniq(toks.begin(), toks.end());
    for (const auto& t : uniq) doc_count[t]++;
    for (const auto& t : toks) {
      occ_count[t]++;
      ++total;
    }
  }
  for (const auto& [tok, dc] : doc_count) {
    stats.vocab.push_back(tok);
    stats.doc_freq.push_back(dc);
    stats.corpus_freq.push_back(static_cast<double>(occ_count[tok]) / total);
    stats.idf.push_back(std::log(static_cast<double>(stats.n_docs) / dc));
  }
  return stats;
}

std::string stats_to_csv(const TokenStats& stats) {
  std::string out = "token,doc_freq,corpus_freq,idf\n";
  char buf[128];
  for (size_t i = 0; i < stats.vocab.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g\n",
                  stats.vocab[i].c_str(), stats.doc_freq[i],
                  stats.corpus_freq[i], stats.idf[i]);
    out += buf;
  }
  return out;
}

}  // namespace zp
