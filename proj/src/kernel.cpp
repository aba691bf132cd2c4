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

#include "speclab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "speclab/error.hpp"
#include "speclab/rng.hpp"

namespace speclab {

namespace {

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string("kernel argument ") + name + " outside [0,1]: " + std::to_string(x));
  }
}

void check_entry(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + ": non-finite value");
  if (v < 0.0) throw ValidationError(std::string(what) + ": negativity violated (" + std::to_string(v) + ")");
}

}  // namespace

Kernel::Kernel(Kind kind, std::vector<double> table, std::size_t n)
    : kind_(kind), table_(std::move(table)), n_(n) {
  switch (kind_) {
    case Kind::constant:
      check_entry(table_[0], "constant kernel");
      f_max_ = table_[0];
      break;
    case Kind::product: {
      if (table_.size() < 2) throw ValidationError("product kernel: r needs at least 2 samples");
      for (double v : table_) check_entry(v, "product kernel r");
      const double rmax = *std::max_element(table_.begin(), table_.end());
      f_max_ = rmax * rmax;
      const double h = 1.0 / static_cast<double>(table_.size() - 1);
      double s = 0.5 * (table_.front() + table_.back());
      for (std::size_t k = 1; k + 1 < table_.size(); ++k) s += table_[k];
      r_integral_ = s * h;
      break;
    }
    case Kind::grid: {
      if (n_ == 0 || table_.size() != n_ * n_) throw ValidationError("grid kernel: values must be an n x n matrix");
      for (double v : table_) check_entry(v, "grid kernel");
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
          if (table_[i * n_ + j] != table_[j * n_ + i]) {
            throw ValidationError("grid kernel: asymmetry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
          }
        }
      }
      f_max_ = *std::max_element(table_.begin(), table_.end());
      grid_row_means_.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += table_[i * n_ + j];
        grid_row_means_[i] = s / static_cast<double>(n_);
      }
      break;
    }
  }
}

Kernel Kernel::constant(double c) { return Kernel(Kind::constant, {c}, 0); }

Kernel Kernel::product(std::vector<double> r) { return Kernel(Kind::product, std::move(r), 0); }

Kernel Kernel::grid(std::vector<double> values, std::size_t n) { return Kernel(Kind::grid, std::move(values), n); }

Kernel Kernel::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) throw ValidationError("kernel: missing \"kind\"");
  const auto kind = doc.at("kind").get<std::string>();
  try {
    if (kind == "constant") return constant(doc.at("c").get<double>());
    if (kind == "product") return product(doc.at("r").get<std::vector<double>>());
    if (kind == "grid") {
      const auto rows = doc.at("values").get<std::vector<std::vector<double>>>();
      const std::size_t n = rows.size();
      std::vector<double> flat;
      flat.reserve(n * n);
      for (const auto& row : rows) {
        if (row.size() != n) throw ValidationError("grid kernel: values must be square");
        flat.insert(flat.end(), row.begin(), row.end());
      }
      return grid(std::move(flat), n);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("kernel: ") + e.what());
  }
  throw ValidationError("kernel: unknown kind \"" + kind + "\"");
}

nlohmann::json Kernel::to_json() const {
  switch (kind_) {
    case Kind::constant:
      return {{"kind", "constant"}, {"c", table_[0]}};
    case Kind::product:
      return {{"kind", "product"}, {"r", table_}};
    case Kind::grid: {
      std::vector<std::vector<double>> rows(n_);
      for (std::size_t i = 0; i < n_; ++i) rows[i].assign(table_.begin() + i * n_, table_.begin() + (i + 1) * n_);
      return {{"kind", "grid"}, {"values", rows}};
    }
  }
  return {};
}

std::string Kernel::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

double Kernel::interp_r(double x) const {
  const std::size_t m = table_.size();
  const double t = x * static_cast<double>(m - 1);
  const std::size_t k = std::min(static_cast<std::size_t>(t), m - 2);
  const double w = t - static_cast<double>(k);
  return (1.0 - w) * table_[k] + w * table_[k + 1];
}

double Kernel::unchecked_eval(double x, double y) const {
  if (x > y) std::swap(x, y);
  switch (kind_) {
    case Kind::constant:
      return table_[0];
    case Kind::product:
      return interp_r(x) * interp_r(y);
    case Kind::grid: {
      const auto cell = [this](double u) {
        return std::min(static_cast<std::size_t>(u * static_cast<double>(n_)), n_ - 1);
      };
      return table_[cell(x) * n_ + cell(y)];
    }
  }
  return 0.0;
}

double Kernel::eval(double x, double y) const {
  check_unit(x, "x");
  check_unit(y, "y");
  return unchecked_eval(x, y);
}

double Kernel::row_marginal(double x) const {
  check_unit(x, "x");
  switch (kind_) {
    case Kind::constant:
      return std::sqrt(table_[0]);
    case Kind::product:
      return std::sqrt(interp_r(x) * r_integral_);
    case Kind::grid:
      return std::sqrt(grid_row_means_[std::min(static_cast<std::size_t>(x * static_cast<double>(n_)), n_ - 1)]);
  }
  return 0.0;
}

std::optional<double> Kernel::factor(double x) const {
  check_unit(x, "x");
  switch (kind_) {
    case Kind::constant:
      return std::sqrt(table_[0]);
    case Kind::product:
      return interp_r(x);
    case Kind::grid:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<double> KernelGrid::row_means() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += values[i * n + j];
    out[i] = s * weight;
  }
  return out;
}

double KernelGrid::mean() const {
  double s = 0.0;
  for (double r : row_means()) s += r;
  return s * weight;
}

KernelGrid discretize(const Kernel& kernel, std::size_t n) {
  if (n < 2) throw DomainError("discretize: grid size must be at least 2");
  KernelGrid g;
  g.n = n;
  g.weight = 1.0 / static_cast<double>(n);
  g.f_max = kernel.f_max();
  g.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.nodes[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  g.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel.eval(g.nodes[i], g.nodes[j]);
      g.values[i * n + j] = v;
      g.values[j * n + i] = v;
    }
  }
  if (kernel.kind() != Kernel::Kind::grid) {
    std::vector<double> factor(n);
    for (std::size_t i = 0; i < n; ++i) factor[i] = *kernel.factor(g.nodes[i]);
    g.factor = std::move(factor);
  }
  return g;
}

}  // namespace speclab
