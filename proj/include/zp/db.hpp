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

#ifndef ZP_DB_HPP
#define ZP_DB_HPP

#include <string>
#include <vector>

#include "zp/term.hpp"

namespace zp {

enum class Split : uint8_t { Train = 0, Val = 1 };
const char* split_name(Split s);

struct DbEntry {
  int index;  // position in the database, 0-based
  std::string name;
  Equation stmt;
  Split split;
  bool rewritable;  // usable as a rewrite rule left to right
};

// Ordered theorem database. Premise visibility is by index: a goal at index i
// may use entries 0..i-1 as premises regardless of their split.
class TheoremDatabase {
 public:
  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }

  int size() const { return static_cast<int>(entries_.size()); }
  const DbEntry& entry(int i) const { return entries_.at(i); }
  const std::vector<DbEntry>& entries() const { return entries_; }

  int add(std::string name, Equation stmt, Split split);

  std::vector<int> indices_of(Split split) const;

  void save(const std::string& path) const;
  static TheoremDatabase load(const std::string& path);

 private:
  SymbolTable symbols_;
  std::vector<DbEntry> entries_;
};

}  // namespace zp

#endif  // ZP_DB_HPP
