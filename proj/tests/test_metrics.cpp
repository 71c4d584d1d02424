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

#include <cmath>
#include <vector>

#include "contest/error.hpp"
#include "contest/metrics.hpp"
#include "contest/report.hpp"
#include "doctest.h"

using namespace contest;

namespace {

const auto kT1 = SuccessFunctionSpec::tullock(1.0);

StateId at_coord(const ContestAutomaton& m, int c) {
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.state(s).coord == c) return s;
  }
  FAIL("no state at coordinate " << c);
  return 0;
}

// Absorption probabilities by plain iteration on the equilibrium chain.
std::vector<double> absorb_by_iteration(const ValueSolution& sol, const ContestAutomaton& m) {
  std::vector<double> q(m.size(), 0.0);
  for (StateId s = 0; s < m.size(); ++s) q[s] = m.winner(s) == Player::kA ? 1.0 : 0.0;
  for (int it = 0; it < 200000; ++it) {
    double moved = 0.0;
    for (StateId s = 0; s < m.size(); ++s) {
      if (m.is_terminal(s)) continue;
      const double p = sol.states[s].win_prob_a;
      double nq = 0.0;
      for (const auto& br : m.next(s, Player::kA)) nq += p * br.prob * q[br.to];
      for (const auto& br : m.next(s, Player::kB)) nq += (1 - p) * br.prob * q[br.to];
      moved = std::max(moved, std::abs(nq - q[s]));
      q[s] = nq;
    }
    if (moved < 1e-15) break;
  }
  return q;
}

}  // namespace

TEST_CASE("best-of-3 dissipation matches exact fractions") {
  const ContestSpec spec(build_best_of(1), kT1, 1.0);
  const auto r = rent_dissipation(solve(spec), spec);
  CHECK(r.total_effort == doctest::Approx(41.0 / 64).epsilon(1e-13));
  CHECK(r.dissipation_ratio == doctest::Approx(41.0 / 64).epsilon(1e-13));
  CHECK(r.min_length == 2);
  CHECK(r.balanced_gain == doctest::Approx(0.25));
  CHECK(r.thm1_bound == doctest::Approx(15.0 / 16).epsilon(1e-13));
  CHECK(r.bound_satisfied);
}

TEST_CASE("dissipation scales out of the prize") {
  const ContestSpec one(build_consecutive_win(3), kT1, 1.0);
  const ContestSpec seven(build_consecutive_win(3), kT1, 7.0);
  const auto a = rent_dissipation(solve(one), one);
  const auto b = rent_dissipation(solve(seven), seven);
  CHECK(b.total_effort == doctest::Approx(7 * a.total_effort).epsilon(1e-9));
  CHECK(b.dissipation_ratio == doctest::Approx(a.dissipation_ratio).epsilon(1e-9));
}

TEST_CASE("dissipation without a finite battle count") {
  const auto r = make_dissipation(1.0, 0.3, 0.3, std::nullopt, 0.25);
  CHECK(r.thm1_bound == 1.0);
  CHECK(r.total_effort == doctest::Approx(0.4));
  CHECK(r.bound_satisfied);
  const auto bad = make_dissipation(1.0, 0.0, 0.0, 1, 0.25);
  CHECK_FALSE(bad.bound_satisfied);
}

TEST_CASE("absorption probabilities agree with iteration") {
  for (const auto& fp : {FamilyParams{Family::kBestOf, 2}, FamilyParams{Family::kTugOfWar, 4, 0.3},
                         FamilyParams{Family::kConsecutiveWin, 4},
                         FamilyParams{Family::kTugOfWar, 3, 0.0, 1}}) {
    const ContestSpec spec(build_family(fp), kT1, 1.0);
    const auto sol = solve(spec);
    const auto q = win_probabilities(sol, spec);
    const auto oracle = absorb_by_iteration(sol, spec.automaton);
    for (StateId s = 0; s < spec.automaton.size(); ++s) {
      CHECK(q.q_a[s] == doctest::Approx(oracle[s]).epsilon(1e-10));
      CHECK(q.q_a[s] + q.q_b[s] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("symmetric contests are fair from the start") {
  const ContestSpec spec(build_tug_of_war(5), kT1, 1.0);
  const auto sol = solve(spec);
  const auto q = win_probabilities(sol, spec);
  CHECK(q.q_a[spec.automaton.start()] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("plain tug-of-war follows the gambler's ruin product") {
  const int n = 6;
  const ContestSpec spec(build_tug_of_war(n), kT1, 1.0);
  const auto sol = solve_tow_closed(n, 0.0, 0, kT1, 1.0);
  const auto& m = spec.automaton;
  // d_j = prod (1 - p_k) / p_k, Q(i) = sum_{j < i} d_j / sum d_j.
  std::vector<double> d(2 * n, 1.0);
  for (int j = -n + 1; j < n; ++j) {
    const double p = sol.states[at_coord(m, j)].win_prob_a;
    d[j + n] = d[j + n - 1] * (1 - p) / p;
  }
  double total = 0;
  for (double x : d) total += x;
  const auto q = win_probabilities(sol, spec);
  double acc = 0;
  for (int i = -n; i <= n; ++i) {
    CHECK(q.q_a[at_coord(m, i)] == doctest::Approx(acc / total).epsilon(1e-10));
    if (i < n) acc += d[i + n];
  }
}

TEST_CASE("tug-of-war advantage profile") {
  const auto p = advantage_profile({Family::kTugOfWar, 20}, kT1);
  REQUIRE(p.tail_start.has_value());
  REQUIRE(p.log10_tail_bound.has_value());
  CHECK(*p.log10_tail_bound < 0.0);
  int checked = 0;
  for (const auto& row : p.rows) {
    if (row.coord > 0) CHECK(row.gain_ratio > 0.5);
    if (row.coord <= *p.tail_start || !row.log10_tail_ratio) continue;
    CHECK(*row.log10_tail_ratio <= *p.log10_tail_bound + 1e-12);
    CHECK(*row.tail_identity_residual <= 1e-10);
    ++checked;
  }
  CHECK(checked >= 10);
  // The frontrunner's odds of losing fall with the lead.
  for (std::size_t k = 1; k < p.rows.size(); ++k) {
    // Far behind, 1 - Q rounds to 1.
    if (p.rows[k].coord > 0) {
      CHECK(p.rows[k].log10_one_minus_q < p.rows[k - 1].log10_one_minus_q);
    } else {
      CHECK(p.rows[k].log10_one_minus_q <= p.rows[k - 1].log10_one_minus_q);
    }
  }
}

TEST_CASE("advantage profile agrees with the double solver where both apply") {
  const auto p = advantage_profile({Family::kTugOfWar, 5}, kT1);
  const ContestSpec spec(build_tug_of_war(5), kT1, 1.0);
  const auto sol = solve(spec);
  const auto q = win_probabilities(sol, spec);
  for (const auto& row : p.rows) {
    CHECK(row.q == doctest::Approx(q.q_a[at_coord(spec.automaton, row.coord)]).epsilon(1e-9));
  }
}

TEST_CASE("consecutive-win advantage after one win fades with K") {
  double prev = 1.0;
  for (int k = 2; k <= 12; ++k) {
    const auto p = advantage_profile({Family::kConsecutiveWin, k}, kT1);
    double q1 = -1;
    for (const auto& row : p.rows) {
      if (row.coord == 1) q1 = row.q;
    }
    REQUIRE(q1 > 0.5);
    CHECK(q1 - 0.5 < prev);
    prev = q1 - 0.5;
  }
  CHECK_THROWS_AS(advantage_profile({Family::kBestOf, 3}, kT1), ContestError);
}

TEST_CASE("self-reinforcement identities") {
  for (const auto& rows : {tow_self_reinforcement(10, kT1), cw_self_reinforcement(10, kT1),
                           tow_self_reinforcement(6, SuccessFunctionSpec::serial(0.5)),
                           cw_self_reinforcement(6, SuccessFunctionSpec::tullock(0.5))}) {
    REQUIRE_FALSE(rows.empty());
    for (const auto& row : rows) {
      CHECK(row.rel_residual <= 1e-10);
      CHECK(row.log10_factor_excess.size() == row.log10_factors.size());
      for (double e : row.log10_factor_excess) CHECK(std::isfinite(e));
      for (double f : row.log10_factors) CHECK(f >= 0.0);
    }
  }
  CHECK(tow_self_reinforcement(10, kT1).size() == 17);
  CHECK(cw_self_reinforcement(10, kT1).size() == 9);
}

TEST_CASE("transient dominance on reset tug-of-war") {
  const ContestSpec spec(build_tug_of_war(10, 0.5), kT1, 1.0);
  const auto sol = solve_tow_closed(10, 0.5, 0, kT1, 1.0);
  const auto best = transient_dominance_search(sol, spec);
  REQUIRE(best.satisfied);
  CHECK(best.searched);
  CHECK(best.epsilon > 0.0);
  CHECK(best.epsilon < 0.25);
  CHECK(best.reach_both_prob >= 1 - best.epsilon);
  CHECK(best.max_weak_value <= best.epsilon * 1.0 + 1e-15);
  CHECK(best.measured_effort >= best.implied_effort_floor);
  CHECK(best.floor_holds);
  CHECK_FALSE(best.set_a_minus.empty());
  CHECK(best.labels_a_minus.size() == best.set_a_minus.size());
  // Satisfaction is monotone in epsilon.
  CHECK(transient_dominance(sol, spec, std::min(0.2499, 2 * best.epsilon)).satisfied);
  CHECK_FALSE(transient_dominance(sol, spec, 0.5 * best.epsilon).satisfied);
}

TEST_CASE("transient dominance fails on a single battle") {
  const ContestSpec spec(build_best_of(0), kT1, 1.0);
  const auto r = transient_dominance_search(solve(spec), spec);
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("geometric tail limit") {
  std::vector<double> a;
  for (int n = 1; n <= 30; ++n) a.push_back(1 - std::pow(0.5, n));
  CHECK(geometric_tail_limit(a) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> flat(10, 0.3);
  CHECK(geometric_tail_limit(flat) == doctest::Approx(0.3));
}

TEST_CASE("tug-of-war plateau agrees with the solver") {
  const auto p = tow_plateau(8, 0.0, kT1);
  REQUIRE(p.dissipation.size() == 8);
  CHECK(p.increments_positive);
  CHECK(p.increments_shrinking);
  CHECK(p.extrapolated_supremum < 1.0);
  CHECK(p.margin_below_one == doctest::Approx(1 - p.extrapolated_supremum));
  for (int n = 1; n <= 5; ++n) {
    const ContestSpec spec(build_tug_of_war(n), kT1, 1.0);
    const auto r = rent_dissipation(solve(spec), spec);
    CHECK(p.dissipation[n - 1] == doctest::Approx(r.dissipation_ratio).epsilon(1e-9));
  }
}

TEST_CASE("serial and parallel sweeps agree") {
  const FamilyParams base{Family::kTugOfWar, 1, 0.3};
  const auto a = sweep(base, 1, 12, kT1, 1.0, {}, false);
  const auto b = sweep(base, 1, 12, kT1, 1.0, {}, true);
  REQUIRE(a.rows.size() == 12);
  CHECK(to_csv(a) == to_csv(b));
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].param == static_cast<int>(k) + 1);
    CHECK(a.rows[k].error.empty());
    CHECK(a.rows[k].dissipation < a.rows[k].thm1_bound);
  }
}

TEST_CASE("consecutive-win sweep trend") {
  const auto t = sweep({Family::kConsecutiveWin, 1}, 1, 10, kT1, 1.0);
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    CHECK(t.rows[k].dissipation > t.rows[k - 1].dissipation);
    CHECK(t.rows[k].v0_a < t.rows[k - 1].v0_a);
    CHECK(t.rows[k].min_length == static_cast<int>(k) + 1);
  }
}
