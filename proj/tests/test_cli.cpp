// Copyright 2026 The clonebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clonebound/cli.hpp"
#include "test_support.hpp"

#ifndef CLONEBOUND_SAMPLES_DIR
#error "CLONEBOUND_SAMPLES_DIR must be defined"
#endif

namespace clonebound {
namespace {

using nlohmann::json;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  CliRun r;
  r.code = cli::run(args, out, err, in);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string sample(const std::string& name) {
  return std::string(CLONEBOUND_SAMPLES_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const json& j) {
  const auto path = std::filesystem::temp_directory_path() / ("clonebound_test_" + name);
  std::ofstream(path) << j.dump();
  return path.string();
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(std::stod(cell));
  return out;
}

TEST(CliBound, TwoStateTask) {
  const CliRun r = run({"bound", "--input", sample("two_state_s05.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("fidelity_lower_bound").get<double>(), 0.9817627, 1e-7);
  EXPECT_NEAR(j.at("fprime_opt").get<double>(), 0.9908394, 1e-7);
  EXPECT_EQ(j.at("lambda"), json({1, 1}));
  EXPECT_TRUE(j.at("feasible").get<bool>());
  EXPECT_EQ(j.at("coefficients").size(), 2u);
  EXPECT_LE(j.at("output_gram_residual").get<double>(), 1e-10);
  EXPECT_TRUE(r.err.empty());
}

TEST(CliBound, OrthogonalTask) {
  const CliRun r = run({"bound", "--input", sample("orthogonal3.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out).at("fidelity_lower_bound").get<double>(), 1.0, 1e-12);
}

TEST(CliBound, BadPriorsExit2) {
  const CliRun r = run({"bound", "--input", sample("bad_priors.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("priors must sum to 1"), std::string::npos) << r.err;
}

TEST(CliBound, ValidationErrors) {
  EXPECT_EQ(run({"bound"}).code, 2);
  EXPECT_EQ(run({"bound", "--input", "/nonexistent/task.json"}).code, 2);
  EXPECT_EQ(run({"bound", "--input", "-"}, "{not json").code, 2);
  EXPECT_EQ(run({"bound", "--input", sample("two_state_s05.json"), "-M", "3"}).code, 2);
  EXPECT_EQ(run({"bound", "--input", sample("two_state_s08_estimate.json")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(CliBound, TextFormat) {
  const CliRun r = run({"bound", "--input", sample("two_state_s05.json"), "--format", "text"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("fidelity_lower_bound: 0.981762746"), std::string::npos) << r.out;
}

TEST(CliBound, OracleBlock) {
  const CliRun r = run({"bound", "--input", sample("two_state_s05.json"), "--oracle", "--restarts",
                     "5", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("oracle").at("f_opt_numeric").get<double>(), 0.9817627, 1e-7);
  EXPECT_EQ(j.at("oracle").at("seed").get<int>(), 3);
}

TEST(CliBound, InfeasibleWarningStillSucceeds) {
  // Complex overlaps leave no sign pattern with a real positive diagonal.
  const CliRun rand = run({"rand", "--n", "3", "--d", "3", "--seed", "0", "-M", "1", "-N", "2"});
  ASSERT_EQ(rand.code, 0);
  const CliRun r = run({"bound", "--input", "-"}, rand.out);
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  if (!j.at("feasible").get<bool>()) {
    EXPECT_NE(r.err.find("warning"), std::string::npos);
  }
}

TEST(CliEstimate, Helstrom) {
  const CliRun r = run({"estimate", "--input", sample("two_state_s08_estimate.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("p_lower_bound").get<double>(), 0.8, 1e-12);
  EXPECT_EQ(j.at("correct_probs").size(), 2u);
  EXPECT_LE(j.at("e_residual").get<double>(), 1e-10);
}

TEST(CliEstimate, IdentityGram) {
  const CliRun r = run({"estimate", "--input", sample("orthogonal3.json"), "-N", "inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out).at("p_lower_bound").get<double>(), 1.0, 1e-12);
  EXPECT_EQ(run({"estimate", "--input", sample("orthogonal3.json")}).code, 2);
}

TEST(CliEstimate, MatchesLibraryBitForBit) {
  const CliRun r = run({"estimate", "--input", sample("equal_overlap3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Mat g = Mat::from_rows({{1, 0.5, 0.5}, {0.5, 1, 0.5}, {0.5, 0.5, 1}});
  const auto f = family_from_gram(
      g, {0.3333333333333333, 0.3333333333333333, 0.3333333333333334});
  const auto e = estimation_bound(f, 2);
  EXPECT_EQ(json::parse(r.out).at("p_lower_bound").get<double>(), e.p_lower_bound);
}

TEST(CliSweep, OracleMatchesClosedForm) {
  const CliRun r = run({"sweep", "--from", "0", "--to", "1", "--step", "0.1", "-M", "1", "-N", "2",
                     "--oracle", "--restarts", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = csv_lines(r.out);
  ASSERT_EQ(lines.size(), 12u);
  EXPECT_EQ(lines[0], "s,fprime_opt,fidelity_lower_bound,oracle_fidelity,closed_form");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto row = csv_row(lines[k]);
    ASSERT_EQ(row.size(), 5u);
    EXPECT_NEAR(row[3], row[4], 1e-6);
    EXPECT_NEAR(row[2], row[4], 1e-9);
  }
}

TEST(CliSweep, GridEdges) {
  EXPECT_EQ(run({"sweep", "--step", "0"}).code, 2);
  EXPECT_EQ(run({"sweep", "--from", "0.5", "--to", "0.2"}).code, 2);
  const CliRun single = run({"sweep", "--from", "0", "--to", "0", "--step", "0.1"});
  ASSERT_EQ(single.code, 0);
  const auto lines = csv_lines(single.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(csv_row(lines[1])[2], 1.0);
}

TEST(CliSweep, UnequalPriorsDropClosedForm) {
  const CliRun r = run({"sweep", "--step", "0.25", "--priors", "0.3,0.7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = csv_lines(r.out);
  EXPECT_EQ(lines[0], "s,fprime_opt,fidelity_lower_bound");
  EXPECT_EQ(lines.size(), 6u);
}

TEST(CliCheck, ZeroPlusFamily) {
  const CliRun r = run({"check", "--input", sample("zero_plus_vectors.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(json::parse(r.out).at("max_deviation").get<double>(), 1e-12);
}

TEST(CliCheck, GramOnlyNeedsVectors) {
  const CliRun r = run({"check", "--input", sample("two_state_s05.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("vectors required"), std::string::npos);
}

TEST(CliCheck, DimensionCapBoundary) {
  const CliRun rand = run({"rand", "--n", "2", "--d", "4", "--seed", "5"});
  ASSERT_EQ(rand.code, 0);
  EXPECT_EQ(run({"check", "--input", "-", "-M", "6"}, rand.out).code, 0);
  EXPECT_EQ(run({"check", "--input", "-", "-M", "7"}, rand.out).code, 2);
}

TEST(CliRand, DeterministicAndValid) {
  const CliRun a = run({"rand", "--n", "3", "--d", "2", "--seed", "7"});
  const CliRun b = run({"rand", "--n", "3", "--d", "2", "--seed", "7"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const CliRun c = run({"rand", "--n", "2", "--d", "1", "--seed", "1"});
  const json j = json::parse(c.out);
  const auto g01 = j.at("gram")[0][1];
  EXPECT_NEAR(std::hypot(g01.at("re").get<double>(), g01.at("im").get<double>()), 1.0, 1e-15);
}

TEST(CliRand, RoundTripsThroughBound) {
  const CliRun rand = run({"rand", "--n", "3", "--d", "2", "--seed", "7", "-M", "1", "-N", "2"});
  ASSERT_EQ(rand.code, 0);
  const CliRun r = run({"bound", "--input", "-"}, rand.out);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"check", "--input", "-"}, rand.out).code, 0);
}

TEST(CliSeed, EnvironmentFallback) {
  const CliRun a = run({"rand", "--n", "2", "--d", "2", "--seed", "42"});
  ::setenv(cli::kSeedEnv, "42", 1);
  const CliRun b = run({"rand", "--n", "2", "--d", "2"});
  ::setenv(cli::kSeedEnv, "nope", 1);
  const CliRun c = run({"rand", "--n", "2", "--d", "2"});
  ::unsetenv(cli::kSeedEnv);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(c.code, 2);
}

TEST(CliOracle, ReportAndDeterminism) {
  const auto path = sample("two_state_s05.json");
  const CliRun a = run({"oracle", "--input", path, "--restarts", "8", "--seed", "9"});
  const CliRun b = run({"oracle", "--input", path, "--restarts", "8", "--seed", "9", "--threads", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json j = json::parse(a.out);
  EXPECT_GE(j.at("f_opt_numeric").get<double>(), j.at("fidelity_lower_bound").get<double>() - 1e-7);
}

TEST(CliOutput, WritesFile) {
  const auto out = (std::filesystem::temp_directory_path() / "clonebound_test_out.json").string();
  const CliRun r = run({"bound", "--input", sample("two_state_s05.json"), "--output", out});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const json j = json::parse(in);
  EXPECT_TRUE(j.contains("fidelity_lower_bound"));
}

TEST(CliSchema, ReportsReparse) {
  const json task = {{"vectors", {{{{"re", 1.0}, {"im", 0.0}}, 0.0}, {0.6, {{"re", 0.0}, {"im", 0.8}}}}},
                     {"priors", {0.25, 0.75}},
                     {"M", 1},
                     {"N", 3}};
  const auto path = write_temp("schema.json", task);
  for (const char* cmd : {"bound", "estimate", "oracle"}) {
    std::vector<std::string> args{cmd, "--input", path, "--restarts", "4"};
    if (std::string(cmd) == "estimate") args = {cmd, "--input", path, "-N", "inf"};
    const CliRun r = run(args);
    ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
    EXPECT_NO_THROW(json::parse(r.out));
  }
}

}  // namespace
}  // namespace clonebound
