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

#include "contest/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "contest/error.hpp"

namespace contest {
namespace {

double limit_win_prob(const SuccessFunctionSpec& sf) {
  if (sf.kind() == SfKind::kNoisy) {
    return sf.noise_q() * limit_win_prob(sf.base()) + 0.5 * (1.0 - sf.noise_q());
  }
  return 1.0;
}

double expect(const FlatAutomaton& m, std::span<const double> v, std::size_t r) {
  double acc = 0.0;
  for (std::size_t k = m.row[r]; k < m.row[r + 1]; ++k) acc += m.prob[k] * v[m.to[k]];
  return acc;
}

}  // namespace

FlatAutomaton::FlatAutomaton(const ContestAutomaton& m) : size(m.size()) {
  row.reserve(2 * size + 1);
  row.push_back(0);
  winner.resize(size, -1);
  for (StateId s = 0; s < size; ++s) {
    if (const auto w = m.winner(s)) winner[s] = static_cast<signed char>(index(*w));
    for (Player w : {Player::kA, Player::kB}) {
      for (const auto& b : m.next(s, w)) {
        to.push_back(b.to);
        prob.push_back(b.prob);
      }
      row.push_back(to.size());
    }
  }
}

BattleEquilibrium stage_battle(const SuccessFunctionSpec& sf, double stake_a, double stake_b) {
  if (stake_a > 0.0 && stake_b > 0.0) return solve_battle(sf, stake_a, stake_b);
  BattleEquilibrium eq;
  if (stake_a <= 0.0 && stake_b <= 0.0) return eq;
  if (stake_a > 0.0) {
    eq.win_prob_a = limit_win_prob(sf);
    eq.payoff_a = augmented_gain(sf, stake_a, 0.0);
    eq.gain_ratio_a = eq.payoff_a / stake_a;
    eq.effort_a = std::max(0.0, eq.win_prob_a * stake_a - eq.payoff_a);
  } else {
    eq.win_prob_a = 1.0 - limit_win_prob(sf);
    eq.payoff_b = augmented_gain(sf, stake_b, 0.0);
    eq.gain_ratio_b = eq.payoff_b / stake_b;
    eq.effort_b = std::max(0.0, (1.0 - eq.win_prob_a) * stake_b - eq.payoff_b);
  }
  return eq;
}

StateValue bellman_update(const FlatAutomaton& m, const SuccessFunctionSpec& sf,
                          std::span<const double> va, std::span<const double> vb, StateId s) {
  const double a_if_a = expect(m, va, 2 * s);
  const double a_if_b = expect(m, va, 2 * s + 1);
  const double b_if_a = expect(m, vb, 2 * s);
  const double b_if_b = expect(m, vb, 2 * s + 1);
  StateValue out;
  out.stake_a = a_if_a - a_if_b;
  out.stake_b = b_if_b - b_if_a;
  const BattleEquilibrium eq = stage_battle(sf, out.stake_a, out.stake_b);
  out.value_a = a_if_b + eq.win_prob_a * out.stake_a - eq.effort_a;
  out.value_b = b_if_a + (1.0 - eq.win_prob_a) * out.stake_b - eq.effort_b;
  out.effort_a = eq.effort_a;
  out.effort_b = eq.effort_b;
  out.win_prob_a = eq.win_prob_a;
  return out;
}

double bellman_sweep_serial(const FlatAutomaton& m, const SuccessFunctionSpec& sf,
                            double damping, std::span<const double> va,
                            std::span<const double> vb, std::span<double> out_a,
                            std::span<double> out_b) {
  double worst = 0.0;
  for (StateId s = 0; s < m.size; ++s) {
    if (m.winner[s] >= 0) {
      out_a[s] = va[s];
      out_b[s] = vb[s];
      continue;
    }
    const StateValue u = bellman_update(m, sf, va, vb, s);
    worst = std::max({worst, std::abs(u.value_a - va[s]), std::abs(u.value_b - vb[s])});
    out_a[s] = (1.0 - damping) * va[s] + damping * u.value_a;
    out_b[s] = (1.0 - damping) * vb[s] + damping * u.value_b;
  }
  return worst;
}

double bellman_sweep_parallel(const FlatAutomaton& m, const SuccessFunctionSpec& sf,
                              double damping, std::span<const double> va,
                              std::span<const double> vb, std::span<double> out_a,
                              std::span<double> out_b) {
  const auto n = static_cast<std::ptrdiff_t>(m.size);
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto s = static_cast<StateId>(i);
    if (m.winner[s] >= 0) {
      out_a[s] = va[s];
      out_b[s] = vb[s];
      continue;
    }
    const StateValue u = bellman_update(m, sf, va, vb, s);
    worst = std::max({worst, std::abs(u.value_a - va[s]), std::abs(u.value_b - vb[s])});
    out_a[s] = (1.0 - damping) * va[s] + damping * u.value_a;
    out_b[s] = (1.0 - damping) * vb[s] + damping * u.value_b;
  }
  return worst;
}

int thread_cap_from_env() {
  const char* raw = std::getenv("CONTEST_LAB_THREADS");
  if (!raw) return 0;
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || n < 1 || n > 4096) return 0;
  return static_cast<int>(n);
}

}  // namespace contest
