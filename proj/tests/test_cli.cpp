// Copyright 2026 The contest-lab Authors
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

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "contest/cli.hpp"
#include "contest/report.hpp"
#include "doctest.h"

using namespace contest;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "contest");
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("solve prints values, dissipation and win probabilities") {
  const auto r = run_cli({"solve", "--family", "best-of", "--k", "1", "--sf", "tullock:r=1",
                          "--prize", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["solution"]["V0_A"].get<double>() == doctest::Approx(23.0 / 128).epsilon(1e-12));
  CHECK(j["dissipation"]["total_effort"].get<double>() == doctest::Approx(41.0 / 64).epsilon(1e-12));
  CHECK(j["dissipation"]["bound_satisfied"] == true);
  CHECK(j.contains("win_probabilities"));
}

TEST_CASE("solve on a tug-of-war family") {
  const auto r = run_cli({"solve", "--family", "tug-of-war", "--margin", "4", "--sf",
                          "tullock:r=1", "--prize", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["solution"]["states"].size() == 7);
}

TEST_CASE("sweep CSV has the documented header") {
  const auto r = run_cli({"sweep", "--family", "consecutive-win", "--k", "1..6", "--sf",
                          "tullock:r=1", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == kSweepCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  CHECK(rows == 6);
}

TEST_CASE("identical runs give identical bytes") {
  const std::vector<std::string> args = {"simulate", "--family", "tug-of-war", "--margin", "2",
                                         "--paths", "5000", "--seed", "11"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = Json::parse(a.out);
  CHECK(j["summary"]["paths"] == 5000);
  CHECK(j["comparison"]["all_pass"] == true);
}

TEST_CASE("check with automatic epsilon") {
  const auto r = run_cli({"check", "--family", "tug-of-war", "--margin", "8", "--reset-p", "0.5",
                          "--epsilon", "auto"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["transient_dominance"]["searched"] == true);
  CHECK(j["transient_dominance"]["satisfied"] == true);
  CHECK(j["min_length"] == 8);
  // Resets break exchangeability: (A,B) may end at -1, (B,A) at +1.
  CHECK(j["exchangeability"]["exchangeable"] == false);
  const auto plain = run_cli({"check", "--family", "tug-of-war", "--margin", "3"});
  REQUIRE(plain.code == 0);
  CHECK(Json::parse(plain.out)["exchangeability"]["exchangeable"] == true);
}

TEST_CASE("incumbency with rounds sized automatically") {
  const auto r = run_cli({"incumbency", "--sub", "mk1", "--k", "3", "--shock-q", "0.5",
                          "--rounds", "auto", "--epsilon", "0.01"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["transient_dominance"]["satisfied"] == true);
}

TEST_CASE("automaton files are accepted") {
  const auto path = std::filesystem::temp_directory_path() / "contest_cli_bo3.json";
  {
    std::ofstream f(path);
    f << dump_json(automaton_to_json(build_best_of(1)));
  }
  const auto r = run_cli({"solve", "--automaton", path.string()});
  std::filesystem::remove(path);
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["solution"]["V0_B"].get<double>() ==
        doctest::Approx(23.0 / 128).epsilon(1e-12));
}

TEST_CASE("output files are written") {
  const auto path = std::filesystem::temp_directory_path() / "contest_cli_out.csv";
  const auto r = run_cli({"sweep", "--family", "tug-of-war", "--margin", "1..3", "--format", "csv",
                          "--output", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == kSweepCsvHeader);
  std::filesystem::remove(path);
}

TEST_CASE("usage and validation errors exit with 2") {
  CHECK(run_cli({"solve", "--bogus"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"solve", "--family", "nope", "--k", "2"}).code == 2);
  CHECK(run_cli({"solve", "--k", "2"}).code == 2);
  CHECK(run_cli({"solve", "--family", "best-of", "--k", "1", "--automaton", "x.json"}).code == 2);
  CHECK(run_cli({"solve", "--family", "best-of", "--k", "1", "--sf", "tullock:r=7"}).code == 2);
  CHECK(run_cli({"solve", "--family", "tug-of-war", "--margin", "3", "--head-start", "3"}).code == 2);
  CHECK(run_cli({"solve", "--automaton", "/nonexistent.json"}).code == 2);
  CHECK(run_cli({"check", "--family", "best-of", "--k", "1", "--epsilon", "x"}).code == 2);
  CHECK(run_cli({"simulate", "--family", "best-of", "--k", "1", "--format", "csv"}).code == 2);
  const auto r = run_cli({"solve", "--family", "best-of"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("non-convergence exits with 3 and reports the residual") {
  const auto r = run_cli({"solve", "--family", "consecutive-win", "--k", "4", "--sf",
                          "ratio:pow,alpha=0.8", "--max-iter", "2"});
  CHECK(r.code == 3);
  const auto j = Json::parse(r.out);
  CHECK(j["residual"].get<double>() > 0.0);
  CHECK(j["iterations"] == 2);
}

TEST_CASE("help exits cleanly") {
  const auto r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sweep") != std::string::npos);
}
