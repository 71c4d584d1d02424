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

// Contest rules as finite-state machines over battle outcomes.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contest/success.hpp"

namespace contest {

enum class Player : unsigned char { kA = 0, kB = 1 };

constexpr Player other(Player p) noexcept { return p == Player::kA ? Player::kB : Player::kA; }
constexpr std::size_t index(Player p) noexcept { return static_cast<std::size_t>(p); }
char to_char(Player p) noexcept;

using StateId = std::size_t;

/// One branch of the chance layer that follows a battle.
struct Branch {
  StateId to = 0;
  double prob = 1.0;
};
using Outcome = std::vector<Branch>;

struct StateInfo {
  std::string label;
  std::optional<Player> terminal;  // winner of the contest if terminal
  std::optional<int> coord;        // 1-D family coordinate (lead, streak)
};

/// Immutable contest rule. After each battle the winner's outcome selects a
/// distribution over next states; a single branch of probability 1 is a
/// deterministic step, several branches form a chance layer (resets, shocks).
///
/// Construction checks: ids in range, terminal states have no outgoing
/// outcomes, nonterminal states have both, branch probabilities are positive
/// and sum to one, every state is reachable from start.
class ContestAutomaton {
 public:
  ContestAutomaton(std::vector<StateInfo> states, StateId start,
                   std::vector<std::array<Outcome, 2>> outcomes);

  std::size_t size() const noexcept { return states_.size(); }
  StateId start() const noexcept { return start_; }
  const StateInfo& state(StateId s) const { return states_.at(s); }
  const std::string& label(StateId s) const { return states_.at(s).label; }
  bool is_terminal(StateId s) const { return states_.at(s).terminal.has_value(); }
  std::optional<Player> winner(StateId s) const { return states_.at(s).terminal; }
  const Outcome& next(StateId s, Player battle_winner) const {
    return outcomes_.at(s)[index(battle_winner)];
  }
  bool has_chance() const noexcept { return has_chance_; }
  std::size_t nonterminal_count() const noexcept;

  const std::vector<StateInfo>& states() const noexcept { return states_; }
  const std::vector<std::array<Outcome, 2>>& outcomes() const noexcept { return outcomes_; }

 private:
  std::vector<StateInfo> states_;
  StateId start_;
  std::vector<std::array<Outcome, 2>> outcomes_;
  bool has_chance_ = false;
};

/// Rule plus battle technology plus prize.
struct ContestSpec {
  ContestAutomaton automaton;
  SuccessFunctionSpec sf;
  double prize = 1.0;

  ContestSpec(ContestAutomaton m, SuccessFunctionSpec f, double v);
};

// ---- builders -------------------------------------------------------------

/// Best-of-(2K+1): states (i, j) of wins; K = 0 is a single battle.
ContestAutomaton build_best_of(int k);

/// Tug-of-war with margin N. States are A's lead -N..N (id = lead + N),
/// start = head_start. With reset_p > 0 every battle outcome that lands on a
/// nonterminal lead is followed by a lottery returning to lead 0.
ContestAutomaton build_tug_of_war(int margin, double reset_p = 0.0, int head_start = 0);

/// First to K wins in a row. States are A's signed streak -K..K (id = i + K).
ContestAutomaton build_consecutive_win(int k);

/// M(K,1): A is the incumbent and wins with one battle; B must win K first.
/// States j = 0..K-1 count B's wins; id K is "incumbent wins", K+1 is
/// "challenger wins".
ContestAutomaton build_mk1(int k);

/// N-extension of a symmetric exchangeable deterministic rule: a chain of
/// pure-streak states from the start, N straight wins end the contest, and
/// the first split record (j, 1) or (1, j) continues in `base` from the state
/// reached by j - 1 wins of the streak holder.
ContestAutomaton build_extension(const ContestAutomaton& base, int n);

// ---- structure ------------------------------------------------------------

/// Fewest battles on any terminal path; nullopt when no terminal is reachable.
std::optional<int> min_length(const ContestAutomaton& m);

bool is_nontrivial(const ContestAutomaton& m);
bool is_acyclic(const ContestAutomaton& m);

/// Reachable states in an order where successors come after predecessors.
/// Throws CycleError if the graph has a cycle.
std::vector<StateId> topological_order(const ContestAutomaton& m);

/// Largest battle distance from the start to any state.
int eccentricity(const ContestAutomaton& m);

using History = std::vector<Player>;
std::string to_string(const History& h);

struct ExchangeabilityResult {
  bool exchangeable = true;
  int depth = 0;
  std::optional<std::pair<History, History>> witness;
};

/// Certifies that outcome sequences of length <= depth that are permutations
/// of each other, and stay nonterminal until their last battle, induce the
/// same continuation (state distribution on the bisimulation quotient).
/// Lengths are scanned from `depth` downward so a witness is as long as
/// possible; within a length, histories are ordered lexicographically with A
/// first and compared against the first history with the same win counts.
ExchangeabilityResult check_exchangeable(const ContestAutomaton& m, int depth);

/// 2 * eccentricity, clamped to [2, 12].
int default_exchange_depth(const ContestAutomaton& m);

/// Involution sigma with sigma(start) = start that swaps the roles of A and B;
/// nullopt when the rule is not symmetric.
std::optional<std::vector<StateId>> find_mirror(const ContestAutomaton& m);

/// Bisimulation quotient (terminal states merge by winner).
ContestAutomaton minimize(const ContestAutomaton& m);

/// Rooted isomorphism of the reachable graphs (labels ignored).
bool isomorphic(const ContestAutomaton& a, const ContestAutomaton& b);

/// The sub-rule reachable from `root`, with `root` as its start.
ContestAutomaton rooted_at(const ContestAutomaton& m, StateId root);

/// Follows a deterministic history from `from`; stops early at a terminal.
StateId walk(const ContestAutomaton& m, StateId from, const History& h);

}  // namespace contest
