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

#include <cstddef>
#include <span>
#include <vector>

#include "contest/automaton.hpp"
#include "contest/success.hpp"

namespace contest {

/// Automaton flattened into CSR arrays for the hot loops. Row 2s holds the
/// A-win branches of state s, row 2s+1 the B-win branches.
struct FlatAutomaton {
  explicit FlatAutomaton(const ContestAutomaton& m);

  std::size_t size = 0;
  std::vector<std::size_t> row;
  std::vector<StateId> to;
  std::vector<double> prob;
  std::vector<signed char> winner;  // -1 nonterminal, 0 A, 1 B
};

struct StateValue {
  double value_a = 0.0;
  double value_b = 0.0;
  double stake_a = 0.0;
  double stake_b = 0.0;
  double effort_a = 0.0;
  double effort_b = 0.0;
  double win_prob_a = 0.5;
};

/// Battle at a state whose stakes may be degenerate. Nonpositive stakes on
/// both sides give zero efforts and a fair coin; a single nonpositive stake
/// hands the other player the limiting win probability and augmented gain.
BattleEquilibrium stage_battle(const SuccessFunctionSpec& sf, double stake_a, double stake_b);

/// One Bellman evaluation at nonterminal state s given continuation values.
StateValue bellman_update(const FlatAutomaton& m, const SuccessFunctionSpec& sf,
                          std::span<const double> va, std::span<const double> vb, StateId s);

/// One Jacobi sweep: out = (1-damping) old + damping T(old) on nonterminal
/// states, terminal entries copied. Returns sup |T(old) - old|.
double bellman_sweep_serial(const FlatAutomaton& m, const SuccessFunctionSpec& sf,
                            double damping, std::span<const double> va,
                            std::span<const double> vb, std::span<double> out_a,
                            std::span<double> out_b);
double bellman_sweep_parallel(const FlatAutomaton& m, const SuccessFunctionSpec& sf,
                              double damping, std::span<const double> va,
                              std::span<const double> vb, std::span<double> out_a,
                              std::span<double> out_b);

/// Reads CONTEST_LAB_THREADS; 0 when unset or invalid.
int thread_cap_from_env();

}  // namespace contest
