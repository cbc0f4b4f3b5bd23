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

#ifndef ZP_COMMON_HPP
#define ZP_COMMON_HPP

#include <stdexcept>
#include <string>

namespace zp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
  using Error::Error;
};

struct ArityError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct NonFiniteLoss : Error {
  using Error::Error;
};

struct ReplayDivergence : Error {
  using Error::Error;
};

}  // namespace zp

#endif  // ZP_COMMON_HPP
