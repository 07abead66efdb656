// Copyright 2026 The btow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "btow/metric_space.h"
#include "btow/space_io.h"
#include "cli.h"
#include "json.hpp"

namespace btow {
namespace {

using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp(const std::string& name) {
  std::filesystem::create_directories(BTOW_TEST_TMPDIR);
  return std::string(BTOW_TEST_TMPDIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

TEST(Cli, SolveIntervalCertifiesTheGap) {
  const Result r = run({"solve", "--family", "interval", "--cells", "64",
                        "--beta", "1", "--odds", "exp", "--eps", "0.125"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["schema_version"], cli::kSchemaVersion);
  EXPECT_EQ(doc["command"], "solve");
  EXPECT_EQ(doc["field"].size(), 65u);
  EXPECT_LT(doc["report"]["gap"].get<double>(), 1e-9);
  EXPECT_FALSE(doc["report"]["stalled"].get<bool>());
  // The resolved configuration is embedded.
  EXPECT_EQ(doc["config"]["eps"], 0.125);
  EXPECT_EQ(doc["config"]["odds"], "exp");
  EXPECT_DOUBLE_EQ(doc["field"][0].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(doc["field"][64].get<double>(), 1.0);
}

TEST(Cli, SolveCsvHasAPreamble) {
  const std::string path = tmp("solve.csv");
  const Result r = run({"solve", "--family", "interval", "--cells", "8",
                        "--eps", "0.25", "--closed", "--min-step-ratio", "1",
                        "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema_version=1");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# config=", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("vertex,x0,", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 9);
}

TEST(Cli, NonConvergenceExitsTwo) {
  const Result r = run({"solve", "--family", "interval", "--cells", "64",
                        "--eps", "0.0625", "--max-sweeps", "2"});
  EXPECT_EQ(r.code, cli::kExitNoConvergence);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, InvalidParametersExitOne) {
  EXPECT_EQ(run({"solve", "--family", "interval"}).code, cli::kExitInvalid);
  EXPECT_EQ(run({"solve", "--family", "interval", "--eps", "-1"}).code,
            cli::kExitInvalid);
  EXPECT_EQ(run({"solve", "--family", "interval", "--eps", "0.1",
                 "--no-such-key", "3"})
                .code,
            cli::kExitInvalid);
  EXPECT_EQ(run({"solve", "--family", "nowhere", "--eps", "0.1"}).code,
            cli::kExitInvalid);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitInvalid);
}

TEST(Cli, SimulateRejectsAStartOutsideTheSpace) {
  const Result r = run({"simulate", "--family", "interval", "--cells", "16",
                        "--eps", "0.25", "--start", "99", "--n", "10",
                        "--s1", "pull:16", "--s2", "pull:0"});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("99"), std::string::npos) << r.err;
}

TEST(Cli, SimulateIsSeeded) {
  const std::vector<std::string> args = {
      "simulate", "--family", "interval", "--cells", "16", "--eps", "0.25",
      "--start", "8", "--s1", "random", "--s2", "random", "--n", "200",
      "--seed", "4"};
  const Result a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const json ja = json::parse(a.out), jb = json::parse(b.out);
  EXPECT_EQ(ja["report"], jb["report"]);
  EXPECT_EQ(ja["report"]["n"], 200);
}

TEST(Cli, ConvergeIntervalTable) {
  const Result r = run({"converge", "--family", "interval", "--depth", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<double> err;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      EXPECT_EQ(line.rfind("level,eps,vertices,ref_error,", 0), 0u);
      header = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    err.push_back(std::stod(cols.at(3)));
  }
  ASSERT_EQ(err.size(), 4u);
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_LE(err[k], err[k - 1]);
}

TEST(Cli, GenSpaceIntervalRoundTrips) {
  const std::string path = tmp("interval4.json");
  ASSERT_EQ(run({"gen-space", "--family", "interval", "--cells", "4", "--out",
                 path})
                .code,
            0);
  const DiscretizedSpace s = load_space(path);
  EXPECT_EQ(s.size(), 5);
  EXPECT_EQ(s.edges().size(), 4u);
  EXPECT_DOUBLE_EQ(s.dist(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(s.dist(0, 4), 1.0);

  // A second pass through the tool reproduces the file.
  const std::string again = tmp("interval4b.json");
  ASSERT_EQ(run({"gen-space", "--space", path, "--out", again}).code, 0);
  const DiscretizedSpace t = load_space(again);
  for (int a = 0; a < 5; ++a) {
    EXPECT_EQ(s.boundary_value(a), t.boundary_value(a));
    EXPECT_EQ(s.is_boundary(a), t.is_boundary(a));
    for (int b = 0; b < 5; ++b) EXPECT_EQ(s.dist(a, b), t.dist(a, b));
  }
}

TEST(Cli, GenSpaceAnnulusUsesTheCone) {
  const Result r =
      run({"gen-space", "--family", "annulus", "--inner", "3", "--outer", "8",
           "--spacing", "1", "--cone-beta", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const DiscretizedSpace s = parse_space_json(r.out);
  int rims = 0;
  for (int v = 0; v < s.size(); ++v) {
    if (!s.is_boundary(v)) continue;
    const auto p = s.coord(v);
    const double rr = std::hypot(p[0], p[1]);
    // Fitted plus cone: 0 at r = 3 and 1 at r = 8.
    const double f = (1 - std::exp(-0.5 * (rr - 3))) /
                     (1 - std::exp(-0.5 * 5));
    EXPECT_NEAR(s.boundary_value(v), f, 1e-12) << "r " << rr;
    ++rims;
  }
  EXPECT_GT(rims, 0);
}

TEST(Cli, GenSpaceSpiralHasALongDetour) {
  const Result r = run({"gen-space", "--family", "spiral"});
  ASSERT_EQ(r.code, 0) << r.err;
  const DiscretizedSpace s = parse_space_json(r.out);
  double best = 0.0;
  for (int a = 0; a < s.size(); a += 7) {
    for (int b = a + 1; b < s.size(); ++b) {
      const auto p = s.coord(a), q = s.coord(b);
      const double e = std::hypot(p[0] - q[0], p[1] - q[1]);
      if (e > 0) best = std::max(best, s.dist(a, b) / e);
    }
  }
  EXPECT_GT(best, 5.0);
}

TEST(Cli, CecCheckPassesAndFails) {
  const std::string sp = tmp("cec_space.json");
  ASSERT_EQ(run({"gen-space", "--family", "interval", "--cells", "32",
                 "--out", sp})
                .code,
            0);
  const std::string field = tmp("cec_u.json");
  ASSERT_EQ(run({"solve", "--space", sp, "--eps", "0.125", "--out", field})
                .code,
            0);
  Result ok = run({"cec-check", "--space", sp, "--eps", "0.125", "--field",
                   field, "--trials", "100"});
  EXPECT_EQ(ok.code, 0) << ok.err;

  json doc = json::parse(slurp(field));
  doc["field"][16] = doc["field"][16].get<double>() + 1000.0;
  const std::string bumped = tmp("cec_bump.json");
  std::ofstream(bumped) << doc.dump();
  Result bad = run({"cec-check", "--space", sp, "--eps", "0.125", "--field",
                    bumped, "--trials", "100", "--side", "above"});
  EXPECT_EQ(bad.code, cli::kExitPropertyFailed);
  const json rep = json::parse(bad.out);
  ASSERT_FALSE(rep["report"]["witnesses"].empty());
  EXPECT_EQ(rep["report"]["witnesses"][0]["vertex"], 16);
}

TEST(Cli, ResidualOnALinearField) {
  const std::string sp = tmp("res_space.json");
  ASSERT_EQ(run({"gen-space", "--family", "grid", "--cells", "9", "--out",
                 sp})
                .code,
            0);
  const DiscretizedSpace s = load_space(sp);
  json arr = json::array();
  for (int v = 0; v < s.size(); ++v) arr.push_back(2 * s.coord(v)[0] + 1);
  const std::string field = tmp("res_field.json");
  std::ofstream(field) << arr.dump();
  const Result r =
      run({"residual", "--space", sp, "--field", field, "--beta", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("phi"), std::string::npos);
}

TEST(Cli, HelpMentionsTheFormats) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  const std::string all = r.out + r.err;
  EXPECT_NE(all.find("solve"), std::string::npos);
  EXPECT_NE(all.find("gen-space"), std::string::npos);
  const Result c = run({"converge", "--help"});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE((c.out + c.err).find("ref_error"), std::string::npos);
}

}  // namespace
}  // namespace btow
