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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contest/automaton.hpp"
#include "contest/solver.hpp"

namespace contest {

/// SplitMix64 (Steele, Lea, Flood). Path p of a run with seed s draws from a
/// generator seeded with mix(s + (p + 1) * 0x9e3779b97f4a7c15).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  static std::uint64_t mix(std::uint64_t z) noexcept;
  static std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) noexcept;

 private:
  std::uint64_t state_;
};

struct SimOptions {
  long paths = 100'000;
  std::uint64_t seed = 1;
  long max_steps = 1'000'000;
};

struct SimulationSummary {
  long paths = 0;
  std::uint64_t seed = 0;
  long max_steps = 0;
  double mean_total_effort = 0.0;
  double se_total_effort = 0.0;
  double win_freq_a = 0.0;
  double se_win = 0.0;
  double mean_length = 0.0;
  long truncated_paths = 0;
  std::vector<long> visits;          // battles fought at each state
  std::vector<long> paths_visiting;  // paths that reach each state at least once
  std::vector<long> a_wins_after;    // of those, paths A goes on to win
};

SimulationSummary simulate(const ValueSolution& sol, const ContestSpec& spec,
                           const SimOptions& opts);
/// Single-threaded reference; output equals simulate() bit for bit.
SimulationSummary simulate_serial(const ValueSolution& sol, const ContestSpec& spec,
                                  const SimOptions& opts);

struct ZRow {
  std::string name;
  double analytic = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = true;
};

struct SimComparison {
  std::vector<ZRow> rows;
  bool skipped = false;
  std::string notice;
  bool all_pass = true;
  double max_abs_z = 0.0;
};

/// z-scores of effort, win frequency and visit-conditional win rates;
/// a row passes when |z| <= z_limit. States seen on fewer than min_paths
/// paths are left out.
SimComparison compare_sim_analytic(const SimulationSummary& summary, const ValueSolution& sol,
                                   const ContestSpec& spec, double z_limit = 4.0,
                                   long min_paths = 100);

}  // namespace contest
