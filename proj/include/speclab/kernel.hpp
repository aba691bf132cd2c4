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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace speclab {

/// Connection kernel f on [0,1]^2: symmetric, nonnegative and bounded.
///
/// Three encodings are supported:
///  - constant: f = c;
///  - product:  f(x,y) = r(x) r(y), with r tabulated on m >= 2 equispaced
///              nodes of [0,1] and linearly interpolated;
///  - grid:     an n x n symmetric matrix read as a step function on the
///              uniform partition of [0,1]^2.
///
/// Instances are validated on construction and immutable afterwards.
class Kernel {
 public:
  enum class Kind { constant, product, grid };

  static Kernel constant(double c);
  static Kernel product(std::vector<double> r);
  /// `values` is row-major n x n.
  static Kernel grid(std::vector<double> values, std::size_t n);

  /// Parses {"kind": "constant"|"product"|"grid", "c"|"r"|"values": ...}.
  static Kernel from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  double f_max() const { return f_max_; }

  /// f(x,y). Arguments are put in canonical order first, so eval(x,y) and
  /// eval(y,x) are bit-identical.
  double eval(double x, double y) const;

  /// F(x) = (int_0^1 f(x,y) dy)^{1/2}.
  double row_marginal(double x) const;

  /// r(x) for product kernels, sqrt(c) for constant ones; empty for grids.
  std::optional<double> factor(double x) const;

  /// Hex digest of the canonical JSON form.
  std::string digest() const;

  const std::vector<double>& table() const { return table_; }
  std::size_t grid_size() const { return n_; }

 private:
  Kernel(Kind kind, std::vector<double> table, std::size_t n);
  double interp_r(double x) const;
  double unchecked_eval(double x, double y) const;

  Kind kind_;
  std::vector<double> table_;  // {c}, r samples, or grid values
  std::size_t n_ = 0;          // grid side length
  double f_max_ = 0.0;
  double r_integral_ = 0.0;    // trapezoid integral of r (product only)
  std::vector<double> grid_row_means_;
};

/// Midpoint discretisation of a kernel for quadrature.
struct KernelGrid {
  std::size_t n = 0;
  std::vector<double> nodes;   // (i + 1/2) / n
  std::vector<double> values;  // row-major n x n, values[i*n+j] = f(nodes[i], nodes[j])
  double weight = 0.0;         // 1/n per node
  double f_max = 0.0;
  /// When present, values[i*n+j] == factor[i]*factor[j] up to rounding;
  /// lets integral operators run in O(n) instead of O(n^2).
  std::optional<std::vector<double>> factor;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  /// Grid version of F(x_i)^2: the quadrature of f(x_i, .).
  std::vector<double> row_means() const;
  /// Quadrature of f over [0,1]^2.
  double mean() const;
};

KernelGrid discretize(const Kernel& kernel, std::size_t n);

}  // namespace speclab
