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

#ifndef ZP_TERM_HPP
#define ZP_TERM_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zp/common.hpp"

namespace zp {

using Sym = uint32_t;

// Interned identifiers with per-symbol arity bookkeeping. Arity is fixed on
// first use; a later use with a different arity raises ArityError.
class SymbolTable {
 public:
  static constexpr int kUnknownArity = -1;

  Sym intern(std::string_view name);
  Sym intern_with_arity(std::string_view name, int arity);
  const std::string& name(Sym s) const { return names_[s]; }
  int arity(Sym s) const { return arity_[s]; }
  void set_arity(Sym s, int arity);
  size_t size() const { return names_.size(); }
  bool contains(std::string_view name) const {
    return ids_.find(std::string(name)) != ids_.end();
  }

 private:
  std::vector<std::string> names_;
  std::vector<int> arity_;
  std::unordered_map<std::string, Sym> ids_;
};

// An identifier denotes a variable iff its first character is in [u-z] or
// [U-Z]; everything else is a constant or function symbol.
bool is_var_name(std::string_view name);

enum class TermKind : uint8_t { Var, Const, App };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable first-order term. App nodes carry the head symbol plus one or
// more children; Var/Const are leaves.
struct Term {
  TermKind kind;
  Sym sym;
  std::vector<TermPtr> kids;
  uint64_t hash;
  uint32_t size;  // node count including this one
};

TermPtr make_var(Sym s);
TermPtr make_const(Sym s);
TermPtr make_app(Sym s, std::vector<TermPtr> kids);

bool term_eq(const TermPtr& a, const TermPtr& b);

// Total order: node count first, then kind, symbol id, children
// lexicographically. Returns <0, 0, >0.
int term_cmp(const TermPtr& a, const TermPtr& b);

void collect_vars(const TermPtr& t, std::vector<Sym>& out);
std::vector<Sym> free_vars(const TermPtr& t);  // sorted, deduplicated

// Parses an s-expression like "(f (g x) a)". Throws SyntaxError with a
// character position, or ArityError on inconsistent arity.
TermPtr parse_term(std::string_view text, SymbolTable& syms);
std::string print_term(const TermPtr& t, const SymbolTable& syms);

struct Equation {
  TermPtr lhs;
  TermPtr rhs;
};

bool equation_eq(const Equation& a, const Equation& b);

// "(= <lhs> <rhs>)"
Equation parse_equation(std::string_view text, SymbolTable& syms);
std::string print_equation(const Equation& eq, const SymbolTable& syms);

// True iff free_vars(rhs) is a subset of free_vars(lhs), i.e. the equation is
// usable as a left-to-right rewrite rule.
bool is_rewritable(const Equation& eq);

// Flat token sequence of an equation: "=", then both sides in prefix order.
// Parentheses are dropped and variables are renamed V0, V1, ... in order of
// first occurrence across the whole equation.
std::vector<std::string> tokenize(const Equation& eq, const SymbolTable& syms);

// tokenize() joined with spaces; used as a renaming-invariant statement key.
std::string canonical_form(const Equation& eq, const SymbolTable& syms);

}  // namespace zp

#endif  // ZP_TERM_HPP
