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

#include <optional>
#include <string>
#include <vector>

#include "contest/automaton.hpp"
#include "contest/solver.hpp"

namespace contest {

struct DissipationReport {
  double prize = 1.0;
  double total_effort = 0.0;
  double dissipation_ratio = 0.0;
  double v0_a = 0.0;
  double v0_b = 0.0;
  std::optional<int> min_length;  // nullopt: no battle-count bound (thm1_bound = 1)
  double balanced_gain = 0.0;     // pi*_1
  double thm1_bound = 0.0;        // 1 - pi*_1^L
  bool bound_satisfied = false;
};

DissipationReport rent_dissipation(const ValueSolution& sol, const ContestSpec& spec);

/// Dissipation report from start values and a known minimum length.
DissipationReport make_dissipation(double prize, double v0_a, double v0_b,
                                   std::optional<int> min_len, double balanced_gain);

struct WinProbabilities {
  std::vector<double> q_a;  // per state, probability A eventually wins
  std::vector<double> q_b;
};

/// Absorption probabilities under equilibrium play. Throws
/// DegenerateChainError when some state cannot be absorbed.
WinProbabilities win_probabilities(const ValueSolution& sol, const ContestSpec& spec);

// ---- advantage profile ----------------------------------------------------

struct AdvantageRow {
  int coord = 0;
  double q = 0.5;                      // P(A wins) from this state
  double one_minus_q = 0.5;
  double log10_one_minus_q = 0.0;
  double gain_ratio = 0.0;             // A's battle gain ratio pi(i)
  double log10_odds = 0.0;             // log10 (1 - pi(i)) / pi(i)
  std::optional<double> tail_ratio;    // (v - V(i+1)) / (v - V(i)), i+1 < N
  std::optional<double> log10_tail_ratio;
  std::optional<double> tail_identity_residual;
};

struct AdvantageProfile {
  Family family = Family::kTugOfWar;
  int size = 0;
  std::vector<AdvantageRow> rows;  // ordered by coordinate, nonterminal only
  // Tug-of-war only: smallest i0 >= 0 with pi(k) > 1/2 for all k > i0, and
  // log10 of (1 - pi~)/pi~ for pi~ = min_{k > i0} pi(k).
  std::optional<int> tail_start;
  std::optional<double> log10_tail_bound;
};

/// Tug-of-war (plain or with resets) and consecutive-win only. Plain
/// tug-of-war is evaluated in extended range so that the deep tails keep
/// their relative precision.
AdvantageProfile advantage_profile(const FamilyParams& fp, const SuccessFunctionSpec& sf,
                                   double prize = 1.0);

// ---- self-reinforcement ---------------------------------------------------

struct ReinforcementRow {
  int i = 0;
  double log10_lhs = 0.0;
  std::vector<double> log10_factors;  // each bracketed amplification factor
  // log10 (factor - 1), evaluated without cancellation; finite iff factor > 1.
  std::vector<double> log10_factor_excess;
  double rel_residual = 0.0;
};

/// Tug-of-war, i in [-(N-2), N-2].
std::vector<ReinforcementRow> tow_self_reinforcement(int margin, const SuccessFunctionSpec& sf);
/// Consecutive-win, i in [0, K-2].
std::vector<ReinforcementRow> cw_self_reinforcement(int k, const SuccessFunctionSpec& sf);

// ---- transient dominance --------------------------------------------------

struct TransientDominanceReport {
  double epsilon = 0.0;
  bool searched = false;
  std::vector<StateId> set_a_minus;
  std::vector<StateId> set_b_minus;
  std::vector<std::string> labels_a_minus;
  std::vector<std::string> labels_b_minus;
  double reach_both_prob = 0.0;
  bool satisfied = false;
  double implied_effort_floor = 0.0;  // (1 - 4 eps) v when satisfied
  double measured_effort = 0.0;
  bool floor_holds = true;            // measured >= floor whenever satisfied
  double max_weak_value = 0.0;        // largest continuation value in the H sets
};

TransientDominanceReport transient_dominance(const ValueSolution& sol, const ContestSpec& spec,
                                             double epsilon);

/// Smallest eps in (0, 1/4) with a satisfied certificate, by bisection
/// (satisfaction is monotone in eps). Returns the unsatisfied report at the
/// upper end when none exists.
TransientDominanceReport transient_dominance_search(const ValueSolution& sol,
                                                    const ContestSpec& spec);

// ---- sweeps ---------------------------------------------------------------

struct SweepRow {
  int param = 0;
  double v0_a = 0.0;
  double v0_b = 0.0;
  double total_effort = 0.0;
  double dissipation = 0.0;
  double thm1_bound = 0.0;
  std::optional<int> min_length;
  std::string error;  // nonempty when the row failed
};

struct SweepTable {
  FamilyParams base;
  std::string sf;
  double prize = 1.0;
  std::vector<SweepRow> rows;
};

/// One solved row per size in [lo, hi]; rows run in parallel and come back
/// ordered by parameter.
SweepTable sweep(const FamilyParams& base, int lo, int hi, const SuccessFunctionSpec& sf,
                 double prize, const CyclicOptions& opts = {}, bool parallel = true);

/// Geometric-tail estimate of the limit of an increasing sequence from its
/// last `window` increments.
double geometric_tail_limit(const std::vector<double>& values, int window = 5);

struct TowPlateau {
  std::vector<double> dissipation;            // margins 1..n_max
  std::vector<double> log10_increment;        // entry k: margin k+1 minus margin k
  std::vector<int> increment_sign;            // +1, 0, -1
  bool increments_positive = false;
  bool increments_shrinking = false;
  double extrapolated_supremum = 1.0;
  double margin_below_one = 0.0;
};

/// Tug-of-war dissipation for margins 1..n_max, with increments computed
/// in extended range from the exact difference formula.
TowPlateau tow_plateau(int n_max, double reset_p, const SuccessFunctionSpec& sf);

}  // namespace contest
