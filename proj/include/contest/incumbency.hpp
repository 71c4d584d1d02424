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

#include <string>
#include <vector>

#include "contest/metrics.hpp"
#include "contest/success.hpp"

namespace contest {

enum class SubKind { kMk1, kTowHeadStart };

std::string to_string(SubKind k);
SubKind parse_sub_kind(const std::string& name);

/// Subcontest reopened by a shock. Player A is always the incumbent.
/// kMk1: the challenger needs k wins before the incumbent wins one.
/// kTowHeadStart: tug-of-war with margin k + 1 started at lead k.
struct SubContest {
  SubKind kind = SubKind::kMk1;
  int k = 1;
};

FamilyParams sub_family(const SubContest& sub);

/// Subcontest values at a given prize.
struct SubValues {
  double v_plus = 0.0;   // incumbent
  double v_minus = 0.0;  // challenger
  double upset = 0.0;    // probability the challenger wins
  double log10_bias = 0.0;  // log10 (prize - V+) / V-
};

/// Homogeneous SFs use subtraction-free recursions in wide precision, since
/// V- underflows double range within a handful of K steps under Tullock r=1.
/// Other SFs go through the generic solver.
SubValues sub_values(const SubContest& sub, const SuccessFunctionSpec& sf, double prize);

/// (1 - V+) / V- of the unit-prize subcontest; may overflow to +inf.
double bias_ratio(const SubContest& sub, const SuccessFunctionSpec& sf);
double log10_bias_ratio(const SubContest& sub, const SuccessFunctionSpec& sf);

struct IncumbencySpec {
  int rounds = 1;
  double shock_q = 1.0;
  SubContest sub;
  SuccessFunctionSpec sf = SuccessFunctionSpec::tullock(1.0);
  double prize = 1.0;
};

void validate(const IncumbencySpec& spec);

struct RoundValues {
  int round = 0;
  double w_plus = 0.0;   // W+(n), value of the round-n incumbent
  double w_minus = 0.0;  // W-(n)
  double v_n = 0.0;      // W+(n+1) - W-(n+1)
  double upset = 0.0;    // challenger's subcontest win probability this round
  double log10_bias_ratio = 0.0;
};

struct TrajectoryPoint {
  int round = 0;
  Player incumbent = Player::kA;
  double value_a = 0.0;
  double value_b = 0.0;
};

struct IncumbencyReport {
  std::vector<RoundValues> rounds;  // rounds[n-1] is round n
  double v_plus_unit = 0.0;
  double v_minus_unit = 0.0;
  double upset_unit = 0.0;
  double log10_bias_ratio = 0.0;  // smallest over the realized rounds
  double bias_ratio = 0.0;        // 10^log10_bias_ratio, possibly +inf
  bool scaled = false;      // unit solve reused for every round
  double start_value = 0.0; // (W+(1) + W-(1)) / 2 for each player
  DissipationReport dissipation;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<std::string> notes;

  /// Distance between the two incumbent identities' points at round n.
  double trajectory_gap(int n) const;
};

IncumbencyReport solve_incumbency(const IncumbencySpec& spec);

TransientDominanceReport incumbency_transient_dominance(const IncumbencyReport& report,
                                                        const IncumbencySpec& spec,
                                                        double epsilon);

/// Smallest N with (1 - q u)^(N - 1) <= epsilon.
int rounds_for_reach(double upset, double shock_q, double epsilon);

}  // namespace contest
