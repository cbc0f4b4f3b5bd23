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

#include "zp/term.hpp"

#include <algorithm>
#include <cctype>

namespace zp {

Sym SymbolTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  Sym s = static_cast<Sym>(names_.size());
  names_.emplace_back(name);
  arity_.push_back(kUnknownArity);
  ids_.emplace(names_.back(), s);
  return s;
}

Sym SymbolTable::intern_with_arity(std::string_view name, int arity) {
  Sym s = intern(name);
  set_arity(s, arity);
  return s;
}

void SymbolTable::set_arity(Sym s, int arity) {
  if (arity_[s] == kUnknownArity) {
    arity_[s] = arity;
  } else if (arity_[s] != arity) {
    throw ArityError("symbol '" + names_[s] + "' used with arity " +
                     std::to_string(arity) + " but previously had arity " +
                     std::to_string(arity_[s]));
  }
}

bool is_var_name(std::string_view name) {
  if (name.empty()) return false;
  char c = name[0];
  return (c >= 'u' && c <= 'z') || (c >= 'U' && c <= 'Z');
}

namespace {

uint64_t hash_combine(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

TermPtr make_leaf(TermKind kind, Sym s) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  t->sym = s;
  t->hash = hash_combine(static_cast<uint64_t>(kind) + 3, s);
  t->size = 1;
  return t;
}

}  // namespace

TermPtr make_var(Sym s) { return make_leaf(TermKind::Var, s); }
TermPtr make_const(Sym s) { return make_leaf(TermKind::Const, s); }

TermPtr make_app(Sym s, std::vector<TermPtr> kids) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::App;
  t->sym = s;
  t->hash = hash_combine(static_cast<uint64_t>(TermKind::App) + 3, s);
  t->size = 1;
  for (const auto& k : kids) {
    t->hash = hash_combine(t->hash, k->hash);
    t->size += k->size;
  }
  t->kids = std::move(kids);
  return t;
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash || a->size != b->size || a->kind != b->kind ||
      a->sym != b->sym)
    return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!term_eq(a->kids[i], b->kids[i])) return false;
  return true;
}

int term_cmp(const TermPtr& a, const TermPtr& b) {
  if (a->size != b->size) return a->size < b->size ? -1 : 1;
  if (a->kind != b->kind)
    return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
  if (a->sym != b->sym) return a->sym < b->sym ? -1 : 1;
  if (a->kids.size() != b->kids.size())
    return a->kids.size() < b->kids.size() ? -1 : 1;
  for (size_t i = 0; i < a->kids.size(); ++i) {
    int c = term_cmp(a->kids[i], b->kids[i]);
    if (c != 0) return c;
  }
  return 0;
}

void collect_vars(const TermPtr& t, std::vector<Sym>& out) {
  if (t->kind == TermKind::Var) {
    out.push_back(t->sym);
    return;
  }
  for (const auto& k : t->kids) collect_vars(k, out);
}

std::vector<Sym> free_vars(const TermPtr& t) {
  std::vector<Sym> vs;
  collect_vars(t, vs);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;
  SymbolTable& syms;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw SyntaxError(msg + " at position " + std::to_string(pos));
  }

  std::string read_ident() {
    size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos;
    }
    if (pos == start) fail("expected identifier");
    return std::string(text.substr(start, pos - start));
  }

  TermPtr parse() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    if (text[pos] == ')') fail("unexpected ')'");
    if (text[pos] == '(') {
      ++pos;
      skip_ws();
      std::string head = read_ident();
      if (is_var_name(head)) fail("variable '" + head + "' cannot be applied");
      std::vector<TermPtr> kids;
      while (true) {
        skip_ws();
        if (pos >= text.size()) fail("missing ')'");
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        kids.push_back(parse());
      }
      if (kids.empty()) fail("application '" + head + "' needs arguments");
      Sym s = syms.intern(head);
      syms.set_arity(s, static_cast<int>(kids.size()));
      return make_app(s, std::move(kids));
    }
    std::string ident = read_ident();
    if (is_var_name(ident)) return make_var(syms.intern(ident));
    Sym s = syms.intern(ident);
    syms.set_arity(s, 0);
    return make_const(s);
  }
};

}  // namespace

TermPtr parse_term(std::string_view text, SymbolTable& syms) {
  Parser p{text, 0, syms};
  TermPtr t = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

static void print_rec(const TermPtr& t, const SymbolTable& syms, std::string& out) {
  if (t->kind != TermKind::App) {
    out += syms.name(t->sym);
    return;
  }
  out += '(';
  out += syms.name(t->sym);
  for (const auto& k : t->kids) {
    out += ' ';
    print_rec(k, syms, out);
  }
  out += ')';
}

std::string print_term(const TermPtr& t, const SymbolTable& syms) {
  std::string out;
  print_rec(t, syms, out);
  return out;
}

bool equation_eq(const Equation& a, const Equation& b) {
  return term_eq(a.lhs, b.lhs) && term_eq(a.rhs, b.rhs);
}

Equation parse_equation(std::string_view text, SymbolTable& syms) {
  Parser p{text, 0, syms};
  p.skip_ws();
  if (p.pos >= text.size() || text[p.pos] != '(')
    p.fail("expected '(= lhs rhs)'");
  ++p.pos;
  p.skip_ws();
  std::string head = p.read_ident();
  if (head != "=") p.fail("expected '=' head");
  Equation eq;
  eq.lhs = p.parse();
  eq.rhs = p.parse();
  p.skip_ws();
  if (p.pos >= text.size() || text[p.pos] != ')') p.fail("missing ')'");
  ++p.pos;
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return eq;
}

std::string print_equation(const Equation& eq, const SymbolTable& syms) {
  return "(= " + print_term(eq.lhs, syms) + " " + print_term(eq.rhs, syms) + ")";
}

bool is_rewritable(const Equation& eq) {
  std::vector<Sym> lv = free_vars(eq.lhs);
  std::vector<Sym> rv = free_vars(eq.rhs);
  return std::includes(lv.begin(), lv.end(), rv.begin(), rv.end());
}

namespace {

void tokenize_rec(const TermPtr& t, const SymbolTable& syms,
                  std::unordered_map<Sym, int>& var_ids,
                  std::vector<std::string>& out) {
  if (t->kind == TermKind::Var) {
    auto it = var_ids.find(t->sym);
    int id;
    if (it == var_ids.end()) {
      id = static_cast<int>(var_ids.size());
      var_ids.emplace(t->sym, id);
    } else {
      id = it->second;
    }
    out.push_back("V" + std::to_string(id));
    return;
  }
  out.push_back(syms.name(t->sym));
  for (const auto& k : t->kids) tokenize_rec(k, syms, var_ids, out);
}

}  // namespace

std::vector<std::string> tokenize(const Equation& eq, const SymbolTable& syms) {
  std::vector<std::string> out;
  out.push_back("=");
  std::unordered_map<Sym, int> var_ids;
  tokenize_rec(eq.lhs, syms, var_ids, out);
  tokenize_rec(eq.rhs, syms, var_ids, out);
  return out;
}

std::string canonical_form(const Equation& eq, const SymbolTable& syms) {
  std::string out;
  for (const auto& tok : tokenize(eq, syms)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

}  // namespace zp
