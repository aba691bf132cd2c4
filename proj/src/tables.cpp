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

#include "speclab/tables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "speclab/error.hpp"

namespace speclab {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  throw SchemaError("table has no column \"" + name + "\"");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError(path.string() + ": not a number: \"" + s + "\"");
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return in;
}

std::string header_line(const std::string& kind, const std::string& digest, const std::string& units) {
  return "# speclab " + kind + " manifest=" + digest + " units=" + units + "\n";
}

// Reads "key=value" from a comment line.
std::optional<std::string> comment_field(const std::string& comment, const std::string& key) {
  std::istringstream in(comment);
  std::string tok;
  while (in >> tok) {
    if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
  }
  return std::nullopt;
}

}  // namespace

Table read_table(const fs::path& path) {
  auto in = open_in(path);
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (t.comment.empty()) t.comment = line.substr(1);
      continue;
    }
    auto cells = split(line, ',');
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw SchemaError(path.string() + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw SchemaError(path.string() + ": missing header row");
  return t;
}

void write_table(const fs::path& path, const std::string& kind, const std::string& digest, const std::string& units,
                 const Table& table) {
  auto out = open_out(path);
  out << header_line(kind, digest, units);
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
}

void write_edge_list(const fs::path& path, const GraphSample& g, const std::string& digest) {
  auto out = open_out(path);
  out << "# speclab edges manifest=" << digest << " units=vertex_index_0_based N=" << g.size()
      << " eps=" << format_double(g.eps) << " seed=" << g.seed << " model=" << to_string(g.model) << "\n";
  out << "i,j\n";
  for (const auto& [i, j] : g.edges()) out << i << "," << j << "\n";
}

GraphSample read_edge_list(const fs::path& path, std::optional<std::size_t> n) {
  const Table t = read_table(path);
  if (t.columns != std::vector<std::string>{"i", "j"}) throw SchemaError(path.string() + ": expected columns i,j");
  std::size_t size = 0;
  if (n) {
    size = *n;
  } else if (auto v = comment_field(t.comment, "N")) {
    size = std::stoul(*v);
  } else {
    for (const auto& r : t.rows) size = std::max<std::size_t>(size, std::stoul(r[1]) + 1);
  }
  double eps = 0.0;
  if (auto v = comment_field(t.comment, "eps")) eps = std::stod(*v);
  std::uint64_t seed = 0;
  if (auto v = comment_field(t.comment, "seed")) seed = std::stoull(*v);
  Model model = Model::inhomogeneous;
  if (auto v = comment_field(t.comment, "model")) model = model_from_string(*v);
  GraphSample g(size, model, eps, seed);
  for (const auto& r : t.rows) {
    const std::size_t i = std::stoul(r[0]), j = std::stoul(r[1]);
    if (i >= j || j >= size) throw SchemaError(path.string() + ": bad edge " + r[0] + "," + r[1]);
    g.set_edge(i, j);
  }
  return g;
}

nlohmann::json sample_manifest(const GraphSample& g) {
  nlohmann::json doc{{"model", to_string(g.model)},
                     {"N", g.size()},
                     {"eps", g.eps},
                     {"seed", g.seed},
                     {"kernel_digest", g.kernel_digest}};
  if (!g.aux.empty()) doc["aux"] = g.aux;
  return doc;
}

void write_eigenvalues(const fs::path& path, const SpectralMeasure& s, const std::string& digest) {
  auto out = open_out(path);
  out << header_line("eigenvalues", digest, "scaled_eigenvalue");
  for (double v : s.values()) out << format_double(v) << "\n";
}

std::vector<double> read_eigenvalues(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_double(line, path));
  }
  return out;
}

void write_histogram(const fs::path& path, const Histogram& h, const std::string& digest) {
  Table t{{"left", "right", "mass"}, {}, {}};
  for (std::size_t k = 0; k < h.masses.size(); ++k) {
    t.rows.push_back({format_double(h.edges[k]), format_double(h.edges[k + 1]), format_double(h.masses[k])});
  }
  write_table(path, "histogram", digest, "eigenvalue,eigenvalue,probability_mass", t);
}

void write_moments(const fs::path& path, const std::vector<MomentRow>& rows, const std::string& digest) {
  Table t{{"p", "value"}, {}, {}};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.order), format_double(r.value)});
  write_table(path, "moments", digest, "dimensionless", t);
}

void write_limit_moments(const fs::path& path, const std::vector<MomentRow>& rows, const std::string& digest) {
  Table t{{"order", "value", "method"}, {}, {}};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.order), format_double(r.value), r.method});
  write_table(path, "limit_moments", digest, "dimensionless", t);
}

std::vector<MomentRow> read_moments(const fs::path& path) {
  const Table t = read_table(path);
  std::size_t order_col = 0;
  if (t.columns.size() >= 2 && t.columns[0] == "p") {
    order_col = 0;
  } else {
    order_col = t.column("order");
  }
  const std::size_t value_col = t.column("value");
  std::optional<std::size_t> method_col;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (t.columns[c] == "method") method_col = c;
  }
  std::vector<MomentRow> out;
  for (const auto& r : t.rows) {
    MomentRow row;
    row.order = static_cast<int>(parse_double(r[order_col], path));
    row.value = parse_double(r[value_col], path);
    if (method_col) row.method = r[*method_col];
    out.push_back(std::move(row));
  }
  return out;
}

void write_density(const fs::path& path, const std::vector<DensityPoint>& points, const std::string& digest) {
  Table t{{"E", "density", "eta"}, {}, {}};
  for (const auto& p : points) {
    t.rows.push_back({format_double(p.energy), format_double(p.density), format_double(p.eta)});
  }
  write_table(path, "density", digest, "energy,density_per_unit_energy,energy", t);
}

std::vector<DensityPoint> read_density(const fs::path& path) {
  const Table t = read_table(path);
  const auto e = t.column("E"), d = t.column("density"), eta = t.column("eta");
  std::vector<DensityPoint> out;
  for (const auto& r : t.rows) {
    out.push_back({parse_double(r[e], path), parse_double(r[d], path), parse_double(r[eta], path), 0, 0.0});
  }
  return out;
}

std::vector<double> read_degrees(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_double(line, path));
  }
  return out;
}

std::string json_text(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void write_json(const fs::path& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << json_text(doc);
}

nlohmann::json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace speclab
