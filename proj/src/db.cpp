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

#include "zp/db.hpp"

#include <fstream>
#include <sstream>

#include "zp/common.hpp"

namespace zp {

const char* split_name(Split s) { return s == Split::Train ? "train" : "val"; }

int TheoremDatabase::add(std::string name, Equation stmt, Split split) {
  int index = static_cast<int>(entries_.size());
  bool rw = is_rewritable(stmt);
  entries_.push_back(DbEntry{index, std::move(name), std::move(stmt), split, rw});
  return index;
}

std::vector<int> TheoremDatabase::indices_of(Split split) const {
  std::vector<int> out;
  for (const auto& e : entries_)
    if (e.split == split) out.push_back(e.index);
  return out;
}

void TheoremDatabase::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  for (const auto& e : entries_) {
    f << "thm " << e.index << ' ' << e.name << ' '
      << print_equation(e.stmt, symbols_) << ' ' << split_name(e.split) << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

TheoremDatabase TheoremDatabase::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  TheoremDatabase db;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kw, name, split_str;
    int index;
    if (!(ss >> kw >> index >> name) || kw != "thm")
      throw SyntaxError("db line " + std::to_string(lineno) + ": bad header");
    std::string rest;
    std::getline(ss, rest);
    size_t last_sp = rest.find_last_of(' ');
    if (last_sp == std::string::npos)
      throw SyntaxError("db line " + std::to_string(lineno) + ": missing split");
    split_str = rest.substr(last_sp + 1);
    std::string eq_str = rest.substr(0, last_sp);
    Split split;
    if (split_str == "train") split = Split::Train;
    else if (split_str == "val") split = Split::Val;
    else
      throw SyntaxError("db line " + std::to_string(lineno) + ": bad split '" +
                        split_str + "'");
    Equation stmt = parse_equation(eq_str, db.symbols_);
    if (index != static_cast<int>(db.entries_.size()))
      throw SyntaxError("db line " + std::to_string(lineno) +
                        ": index out of order");
    db.add(std::move(name), std::move(stmt), split);
  }
  return db;
}

}  // namespace zp
