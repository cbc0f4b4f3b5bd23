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

// Shared helpers for the test binaries: parse shortcuts, a random term
// generator, and a chi-square tail probability for frequency tests.

#ifndef ZP_TESTS_TEST_UTIL_HPP
#define ZP_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "zp/rng.hpp"
#include "zp/term.hpp"

namespace zptest {

inline zp::TermPtr T(const std::string& s, zp::SymbolTable& st) {
  return zp::parse_term(s, st);
}

inline zp::Equation EQ(const std::string& s, zp::SymbolTable& st) {
  return zp::parse_equation(s, st);
}

// Random terms over a fixed signature: constants a b c e, variables u..z,
// unary g, binary m, ternary h.
inline zp::TermPtr random_term(zp::Rng& rng, zp::SymbolTable& st, int depth) {
  static const char* kConsts[] = {"a", "b", "c", "e"};
  static const char* kVars[] = {"u", "v", "w", "x", "y", "z"};
  if (depth <= 0 || rng.next_below(4) == 0) {
    if (rng.next_below(2) == 0)
      return zp::make_const(st.intern_with_arity(kConsts[rng.next_below(4)], 0));
    return zp::make_var(st.intern(kVars[rng.next_below(6)]));
  }
  switch (rng.next_below(3)) {
    case 0:
      return zp::make_app(st.intern_with_arity("g", 1),
                          {random_term(rng, st, depth - 1)});
    case 1:
      return zp::make_app(st.intern_with_arity("m", 2),
                          {random_term(rng, st, depth - 1),
                           random_term(rng, st, depth - 1)});
    default:
      return zp::make_app(st.intern_with_arity("h", 3),
                          {random_term(rng, st, depth - 1),
                           random_term(rng, st, depth - 1),
                           random_term(rng, st, depth - 1)});
  }
}

// Regularized lower incomplete gamma P(a, x), series for x < a+1 and
// continued fraction otherwise (standard gammp construction).
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -1.0 * i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Upper tail p-value of a chi-square statistic with dof degrees of freedom.
inline double chi_square_pvalue(double stat, int dof) {
  return 1.0 - gamma_p(dof / 2.0, stat / 2.0);
}

// Chi-square statistic for observed counts vs uniform expectation.
inline double chi_square_uniform(const std::vector<int>& counts, double total) {
  double expected = total / counts.size();
  double stat = 0.0;
  for (int c : counts) {
    double d = c - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace zptest

#endif  // ZP_TESTS_TEST_UTIL_HPP
