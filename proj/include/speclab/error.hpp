/*
 * Copyright (C) 2026 The speclab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace speclab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// A kernel, law or degree sequence violates a declared invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// Edge probabilities would exceed 1 (eps * f_max > 1 and friends).
struct AdmissibilityError : Error {
  using Error::Error;
};

struct InfeasibleError : Error {
  InfeasibleError(const std::string& what, std::vector<std::size_t> offending)
      : Error(what), offending(std::move(offending)) {}
  std::vector<std::size_t> offending;
};

/// Iterative solver hit its cap; carries the last residual it saw.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  double residual;
  std::size_t iterations;
};

/// Input file or table does not have the expected columns or rows.
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace speclab
