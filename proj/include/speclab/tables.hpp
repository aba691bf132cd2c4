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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "speclab/sampler.hpp"
#include "speclab/spectra.hpp"
#include "speclab/stieltjes.hpp"

namespace speclab {

// Every text table starts with one comment line
//   # speclab <kind> manifest=<digest> units=<units>
// followed by the column header and the rows. Readers skip '#' lines.

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string comment;  // first '#' line, without the marker

  /// Index of a column; throws SchemaError when absent.
  std::size_t column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const std::string& kind, const std::string& digest,
                 const std::string& units, const Table& table);

/// CSV "i,j", 0-based, i < j. The comment line records N and eps.
void write_edge_list(const std::filesystem::path& path, const GraphSample& g, const std::string& digest);
/// Reads an edge list. N comes from the comment line unless given.
GraphSample read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> n = std::nullopt);

/// {model, N, eps, seed, kernel_digest, aux?}
nlohmann::json sample_manifest(const GraphSample& g);

/// One eigenvalue per line.
void write_eigenvalues(const std::filesystem::path& path, const SpectralMeasure& s, const std::string& digest);
std::vector<double> read_eigenvalues(const std::filesystem::path& path);

/// CSV "left,right,mass".
void write_histogram(const std::filesystem::path& path, const Histogram& h, const std::string& digest);

struct MomentRow {
  int order = 0;
  double value = 0.0;
  std::string method;  // empty for "p,value" tables
};

/// CSV "p,value".
void write_moments(const std::filesystem::path& path, const std::vector<MomentRow>& rows, const std::string& digest);
/// CSV "order,value,method".
void write_limit_moments(const std::filesystem::path& path, const std::vector<MomentRow>& rows,
                         const std::string& digest);
/// Reads either moment layout.
std::vector<MomentRow> read_moments(const std::filesystem::path& path);

/// CSV "E,density,eta".
void write_density(const std::filesystem::path& path, const std::vector<DensityPoint>& points,
                   const std::string& digest);
std::vector<DensityPoint> read_density(const std::filesystem::path& path);

/// One number per line; blank and '#' lines ignored.
std::vector<double> read_degrees(const std::filesystem::path& path);

std::string json_text(const nlohmann::json& doc);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace speclab
