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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "speclab/error.hpp"
#include "speclab/tables.hpp"
#include "speclab/workbench.hpp"

using namespace speclab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("speclab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

// Every regular file except the run record, by name.
std::map<std::string, std::string> outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() != "run_record.json") out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

json kernel_manifest(const fs::path& dir) {
  auto doc = json::parse(R"({
    "model": {"type": "kernel", "kernel": {"kind": "constant", "c": 1.0}},
    "N": [60, 80],
    "seeds": {"base": 3, "count": 2},
    "pipeline": "adjacency",
    "outputs": {"eigenvalues": true, "histogram": {"bins": 10}, "moments": 8, "limit": true}
  })");
  doc["output_dir"] = dir.string();
  return doc;
}

}  // namespace

TEST_CASE("tables carry a header line and round-trip") {
  const auto dir = scratch("tables");
  GraphSample g(5, Model::chung_lu, 0.25, 77);
  g.set_edge(0, 4);
  g.set_edge(1, 2);
  write_edge_list(dir / "e.csv", g, "abc");
  CHECK(first_line(dir / "e.csv").rfind("# speclab edges manifest=abc units=", 0) == 0);
  const auto back = read_edge_list(dir / "e.csv");
  CHECK(back.size() == 5);
  CHECK(back.eps == 0.25);
  CHECK(back.seed == 77);
  CHECK(back.model == Model::chung_lu);
  CHECK(back.edges() == g.edges());

  const SpectralMeasure s({0.1, -1.0 / 3.0, 2.0});
  write_eigenvalues(dir / "eig.txt", s, "abc");
  CHECK(read_eigenvalues(dir / "eig.txt") == s.values());

  write_moments(dir / "m.csv", {{1, 0.5, {}}, {2, 1.0 / 7.0, {}}}, "abc");
  const auto m = read_moments(dir / "m.csv");
  REQUIRE(m.size() == 2);
  CHECK(m[1].value == 1.0 / 7.0);
  CHECK(first_line(dir / "m.csv") == "# speclab moments manifest=abc units=dimensionless");

  write_limit_moments(dir / "l.csv", {{2, 1.0, "mu_nc2"}}, "abc");
  CHECK(read_moments(dir / "l.csv")[0].method == "mu_nc2");

  write_density(dir / "d.csv", {{0.5, 0.3, 1e-3, 4, 0.0}}, "abc");
  CHECK(read_density(dir / "d.csv")[0].density == 0.3);

  std::ofstream(dir / "deg.txt") << "# degrees\n1\n2.5\n\n3\n";
  CHECK(read_degrees(dir / "deg.txt") == std::vector<double>{1.0, 2.5, 3.0});

  std::ofstream(dir / "bad.csv") << "# x\na,b\n1\n";
  CHECK_THROWS_AS((void)read_table(dir / "bad.csv"), SchemaError);
  std::ofstream(dir / "nan.csv") << "p,value\n1,abc\n";
  CHECK_THROWS_AS((void)read_moments(dir / "nan.csv"), SchemaError);
  CHECK_THROWS_AS((void)read_edge_list(dir / "m.csv"), SchemaError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("manifest validation") {
  const auto dir = scratch("manifest");
  const auto base = kernel_manifest(dir);
  const auto m = ExperimentManifest::from_json(base);
  CHECK(m.sizes == std::vector<std::size_t>{60, 80});
  CHECK(m.seed_count == 2);
  CHECK(m.eps.inv_sqrt_n);
  CHECK(m.subtract_mean);

  auto bad = base;
  bad["N"] = {1};
  CHECK_THROWS_AS((void)ExperimentManifest::from_json(bad), ValidationError);
  bad = base;
  bad["seeds"]["count"] = 0;
  CHECK_THROWS_AS((void)ExperimentManifest::from_json(bad), ValidationError);
  bad = base;
  bad["pipeline"] = "fourier";
  CHECK_THROWS_AS((void)ExperimentManifest::from_json(bad), ValidationError);
  bad = base;
  bad["model"] = {{"type", "kernel"}, {"kernel_file", "missing.json"}};
  CHECK_THROWS_AS((void)ExperimentManifest::from_json(bad, dir), ValidationError);
  bad = base;
  bad["model"] = {{"type", "chung_lu"}, {"weights", {1.0, 2.0, 3.0}}};
  CHECK_THROWS_AS((void)ExperimentManifest::from_json(bad), ValidationError);  // N list disagrees
  bad.erase("N");
  CHECK(ExperimentManifest::from_json(bad).sizes == std::vector<std::size_t>{3});

  // File references are inlined, so the digest does not depend on how the kernel was given.
  write_json(dir / "k.json", json{{"kind", "constant"}, {"c", 1.0}});
  auto by_file = base;
  by_file["model"] = {{"type", "kernel"}, {"kernel_file", "k.json"}};
  CHECK(ExperimentManifest::from_json(by_file, dir).digest() == m.digest());
}

TEST_CASE("manifest digest is stable under re-serialisation") {
  const auto dir = scratch("digest");
  const auto m = ExperimentManifest::from_json(kernel_manifest(dir));
  const auto again = ExperimentManifest::from_json(json::parse(m.to_json().dump()));
  CHECK(again.digest() == m.digest());
  CHECK(again.to_json() == m.to_json());
  auto moved = m;
  moved.output_dir = "elsewhere";
  CHECK(moved.digest() == m.digest());
  auto reseeded = m;
  reseeded.seed_base = 4;
  CHECK(reseeded.digest() != m.digest());
  CHECK(m.replicate_seed(0) != m.replicate_seed(1));
}

TEST_CASE("sample writes one edge list per (N, replicate)") {
  const auto dir = scratch("sample");
  auto doc = kernel_manifest(dir);
  doc["N"] = {10, 400};
  const auto rec = cmd_sample(ExperimentManifest::from_json(doc), 2);
  CHECK(rec.ok());
  CHECK(rec.replicates.size() == 4);
  for (const auto& r : rec.replicates)
    for (const auto& f : r.files) CHECK(fs::exists(f));
  CHECK(fs::exists(dir / "edges_N10_r0.csv"));
  CHECK(fs::exists(dir / "edges_N10_r1.csv"));
  const auto meta = read_json(dir / "sample_N400_r0.json");
  CHECK(meta["eps"].get<double>() == 0.05);
  CHECK(meta["manifest_digest"] == rec.manifest_digest);
  CHECK(read_json(dir / "run_record.json")["manifest_digest"] == rec.manifest_digest);
}

TEST_CASE("outputs are byte-identical across worker counts") {
  std::map<std::string, std::string> reference;
  for (std::size_t workers : {1u, 4u, 8u}) {
    const auto dir = scratch("det" + std::to_string(workers));
    const auto m = ExperimentManifest::from_json(kernel_manifest(dir));
    REQUIRE(cmd_sample(m, workers).ok());
    REQUIRE(cmd_spectrum(m, workers).ok());
    const auto out = outputs(dir);
    CHECK(out.size() == 19);
    if (reference.empty()) {
      reference = out;
    } else {
      CHECK(out == reference);
    }
  }
}

TEST_CASE("spectrum aggregates moments, histogram and limit") {
  const auto dir = scratch("spectrum");
  const auto rec = cmd_spectrum(ExperimentManifest::from_json(kernel_manifest(dir)), 2);
  REQUIRE(rec.ok());
  const auto mom = read_moments(dir / "moments_N80.csv");
  REQUIRE(mom.size() == 8);
  CHECK(mom.front().order == 1);
  CHECK(mom.back().order == 8);
  const auto summary = read_json(dir / "summary_N80.json");
  CHECK(summary["moments"][1]["limit"].get<double>() == doctest::Approx(1.0));
  CHECK(summary["moments"][1].contains("stderr"));
  const auto hist = read_table(dir / "hist_N80.csv");
  CHECK(hist.rows.size() == 10);
  for (const auto& f : rec.files) CHECK(fs::exists(f));
}

TEST_CASE("an empty-graph kernel gives an all-zero spectrum") {
  const auto dir = scratch("empty");
  auto doc = kernel_manifest(dir);
  doc["model"]["kernel"]["c"] = 0.0;
  doc["N"] = {20};
  doc["seeds"]["count"] = 1;
  REQUIRE(cmd_spectrum(ExperimentManifest::from_json(doc), 1).ok());
  for (double v : read_eigenvalues(dir / "eigs_N20_r0.txt")) CHECK(v == 0.0);
}

TEST_CASE("replicate failures are reported with their index") {
  const auto dir = scratch("fail");
  auto doc = kernel_manifest(dir);
  doc["model"]["kernel"]["c"] = 50.0;
  doc["N"] = {20};
  const auto rec = cmd_sample(ExperimentManifest::from_json(doc), 1);
  CHECK_FALSE(rec.ok());
  CHECK(rec.replicates[1].error.find("replicate 1") != std::string::npos);
  CHECK(read_json(dir / "run_record.json")["partial"].get<bool>());
}

TEST_CASE("limit tables for the constant kernel") {
  const auto dir = scratch("limit");
  LimitRequest req;
  req.mu_order = 6;
  req.nu_order = 4;
  req.energies = {0.0};
  req.grid = 32;
  req.output_dir = dir;
  REQUIRE(cmd_limit(req, 1).ok());
  std::vector<double> mu, nu;
  for (const auto& r : read_moments(dir / "limit_moments.csv")) (r.method == "mu_nc2" ? mu : nu).push_back(r.value);
  CHECK(mu == std::vector<double>{1, 0, 1, 0, 2, 0, 5});
  REQUIRE(nu.size() == 5);
  CHECK(nu[2] == doctest::Approx(2.0));
  CHECK(nu[4] == doctest::Approx(9.0));
  CHECK(std::abs(read_density(dir / "density.csv")[0].density - 0.3183) < 1e-3);
  CHECK(read_json(dir / "solver.json")["residual"].get<double>() < 1e-8);
  req.mu_order = 14;
  CHECK_THROWS_AS((void)cmd_limit(req, 1), DomainError);
}

TEST_CASE("compare reports deltas and rejects mismatched tables") {
  const auto dir = scratch("compare");
  write_moments(dir / "a.csv", {{1, 0.0, {}}, {2, 1.0, {}}, {4, 2.1, {}}}, "x");
  write_limit_moments(dir / "b.csv", {{1, 0.0, "mu_nc2"}, {2, 1.0, "mu_nc2"}, {4, 2.0, "mu_nc2"}}, "y");
  CompareRequest same{dir / "a.csv", dir / "a.csv", {}, {}, {}, {}, {}};
  const auto zero = cmd_compare(same);
  for (const auto& o : zero["orders"]) CHECK(o["delta"].get<double>() == 0.0);
  CompareRequest req{dir / "a.csv", dir / "b.csv", {}, {}, {}, {}, {}};
  const auto rep = cmd_compare(req);
  CHECK(rep["orders"][2]["rel_error"].get<double>() == doctest::Approx(0.05));
  CHECK(rep["max_rel_error"].get<double>() == doctest::Approx(0.05));

  write_moments(dir / "c.csv", {{6, 5.0, {}}}, "x");
  CHECK_THROWS_AS((void)cmd_compare(CompareRequest{dir / "c.csv", dir / "b.csv", {}, {}, {}, {}, {}}), SchemaError);
  write_limit_moments(dir / "mixed.csv", {{2, 1.0, "mu_nc2"}, {2, 2.0, "nu_words"}}, "y");
  CHECK_THROWS_AS((void)cmd_compare(CompareRequest{dir / "a.csv", dir / "mixed.csv", {}, {}, {}, {}, {}}),
                  SchemaError);

  write_eigenvalues(dir / "e.txt", SpectralMeasure({-1.0, 0.0, 1.0}), "x");
  write_density(dir / "d.csv", {{-2.0, 0.25, 1e-3, 0, 0.0}, {2.0, 0.25, 1e-3, 0, 0.0}}, "y");
  CompareRequest ks{dir / "a.csv", dir / "b.csv", {}, dir / "e.txt", {}, dir / "d.csv", {}};
  // Uniform[-2,2] reference against atoms at -1, 0, 1.
  CHECK(cmd_compare(ks)["ks_distance"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("recover and maxent commands") {
  const auto dir = scratch("recover");
  RecoverRequest bad;
  bad.n_max = 0;
  bad.output_dir = dir;
  CHECK_THROWS_AS((void)cmd_recover(bad, 1), DomainError);

  auto doc = json::parse(R"({"model": {"type": "sociability", "law": {"kind": "constant", "value": 1.0}},
                             "N": [600], "seeds": {"base": 1, "count": 2}})");
  RecoverRequest req;
  req.manifest = ExperimentManifest::from_json(doc);
  req.n_max = 2;
  req.output_dir = dir;
  const auto rec = cmd_recover(req, 2);
  REQUIRE(rec.ok());
  const auto t = read_table(dir / "recovered_moments.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(std::stod(t.rows[1][1]) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(t.columns == std::vector<std::string>{"order", "value", "stderr"});

  const auto mdir = scratch("maxent");
  MaxentRequest me;
  me.degrees = {1.0, 1.0, 1.0, 1.0};
  me.tol = 1e-12;
  me.sample = true;
  me.replicates = 2;
  me.output_dir = mdir;
  REQUIRE(cmd_maxent(me, 1).ok());
  const auto sol = read_table(mdir / "maxent_solution.csv");
  CHECK(std::stod(sol.rows[0][sol.column("x_i")]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(read_json(mdir / "maxent_report.json")["converged"].get<bool>());
  CHECK(fs::exists(mdir / "edges_N4_r1.csv"));
  me.degrees = {3.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)cmd_maxent(me, 1), InfeasibleError);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(std::nullopt) >= 1);
}
