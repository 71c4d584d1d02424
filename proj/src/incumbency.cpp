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

#include "contest/incumbency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contest/error.hpp"
#include "detail/wide.hpp"

namespace contest {

std::string to_string(SubKind k) { return k == SubKind::kMk1 ? "mk1" : "tow-head-start"; }

SubKind parse_sub_kind(const std::string& name) {
  if (name == "mk1") return SubKind::kMk1;
  if (name == "tow-head-start") return SubKind::kTowHeadStart;
  throw ValidationError("unknown subcontest '" + name + "' (mk1, tow-head-start)");
}

FamilyParams sub_family(const SubContest& sub) {
  if (sub.k < 1) throw DomainError("subcontest size must be at least 1");
  FamilyParams fp;
  if (sub.kind == SubKind::kMk1) {
    fp.family = Family::kMk1;
    fp.size = sub.k;
  } else {
    fp.family = Family::kTugOfWar;
    fp.size = sub.k + 1;
    fp.head_start = sub.k;
  }
  return fp;
}

namespace {

using detail::Wide;

// Challenger needs K wins in a row. With c = v - V_A and b = V_B after the
// challenger's j-th win, one step back is c <- c phi_c(c/b), b <- b phi(b/c).
SubValues mk1_wide(const detail::HomogeneousGain<Wide>& g, int k) {
  Wide c = 1, b = 1, upset = 1;
  for (int j = k - 1; j >= 0; --j) {
    const Wide theta = c / b;
    const auto hi = g.eval(theta);
    const auto lo = g.eval(Wide(1) / theta);
    upset *= lo.gamma;
    c *= hi.phi_c;
    b *= lo.phi;
  }
  return {static_cast<double>(1 - c), static_cast<double>(b), static_cast<double>(upset),
          detail::lg(Wide(c / b))};
}

// Tug-of-war with margin K + 1 started at lead K, read off the increments.
SubValues tow_head_wide(const detail::HomogeneousGain<Wide>& g, int k) {
  const int n = k + 1;
  const auto inc = detail::tow_increments(g, n, 0.0, detail::wide_inverse(g));
  const auto inc_at = [&](int j) -> const Wide& { return j >= 1 ? inc.d[j - 1] : inc.e[-j]; };
  const auto stake = [&](int i) { return Wide(inc_at(i) + inc_at(i + 1)); };
  const Wide span = inc.up_total + inc.down_total;
  // Gambler's ruin from lead N - 1: weight d_j = prod of loss odds up to j.
  Wide run = 1, total = 1, last = 1;
  for (int j = -n + 1; j < n; ++j) {
    const Wide theta = stake(j) / stake(-j);
    run *= g.eval(Wide(1) / theta).gamma / g.eval(theta).gamma;
    total += run;
    last = run;
  }
  return {static_cast<double>(1 - inc.d[n - 1] / span), static_cast<double>(inc.e[n - 1] / span),
          static_cast<double>(last / total), detail::lg(Wide(inc.d[n - 1] / inc.e[n - 1]))};
}

}  // namespace

SubValues sub_values(const SubContest& sub, const SuccessFunctionSpec& sf, double prize) {
  const FamilyParams fp = sub_family(sub);
  if (sf.is_homogeneous()) {
    detail::widen_exponent_range();
    const detail::HomogeneousGain<Wide> g(sf);
    SubValues u = sub.kind == SubKind::kMk1 ? mk1_wide(g, sub.k) : tow_head_wide(g, sub.k);
    u.v_plus *= prize;
    u.v_minus *= prize;
    return u;
  }
  const ContestSpec spec(build_family(fp), sf, prize);
  const ValueSolution sol = solve_family(fp, sf, prize);
  const WinProbabilities q = win_probabilities(sol, spec);
  return {sol.v0_a(), sol.v0_b(), q.q_b[sol.start],
          std::log10((prize - sol.v0_a()) / sol.v0_b())};
}

double log10_bias_ratio(const SubContest& sub, const SuccessFunctionSpec& sf) {
  return sub_values(sub, sf, 1.0).log10_bias;
}

double bias_ratio(const SubContest& sub, const SuccessFunctionSpec& sf) {
  return std::pow(10.0, log10_bias_ratio(sub, sf));
}

void validate(const IncumbencySpec& spec) {
  if (spec.rounds < 1) throw DomainError("incumbency: rounds must be at least 1");
  if (!(spec.shock_q > 0.0 && spec.shock_q <= 1.0)) {
    throw DomainError("incumbency: shock_q must lie in (0, 1]");
  }
  if (!(spec.prize > 0.0)) throw DomainError("incumbency: prize must be positive");
  if (spec.sub.k < 1) throw DomainError("incumbency: subcontest size must be at least 1");
}

double IncumbencyReport::trajectory_gap(int n) const {
  const RoundValues& r = rounds.at(static_cast<std::size_t>(n - 1));
  return std::sqrt(2.0) * (r.w_plus - r.w_minus);
}

IncumbencyReport solve_incumbency(const IncumbencySpec& spec) {
  validate(spec);
  const int n_rounds = spec.rounds;
  const double q = spec.shock_q;
  const double v = spec.prize;
  IncumbencyReport rep;
  rep.scaled = spec.sf.is_homogeneous();
  const SubValues unit = sub_values(spec.sub, spec.sf, 1.0);
  rep.v_plus_unit = unit.v_plus;
  rep.v_minus_unit = unit.v_minus;
  rep.upset_unit = unit.upset;
  if (!rep.scaled) {
    rep.notes.push_back(
        "non-homogeneous success function: subcontest re-solved per round; the bias "
        "condition is checked on the realized round stakes only");
  }

  rep.rounds.resize(static_cast<std::size_t>(n_rounds));
  double w_plus_next = v;
  double w_minus_next = 0.0;
  double min_bias = std::numeric_limits<double>::infinity();
  for (int n = n_rounds; n >= 1; --n) {
    RoundValues& r = rep.rounds[static_cast<std::size_t>(n - 1)];
    r.round = n;
    r.v_n = w_plus_next - w_minus_next;
    SubValues s{unit.v_plus * r.v_n, unit.v_minus * r.v_n, unit.upset, unit.log10_bias};
    if (!rep.scaled && r.v_n > 0.0) s = sub_values(spec.sub, spec.sf, r.v_n);
    r.upset = s.upset;
    r.log10_bias_ratio = s.log10_bias;
    min_bias = std::min(min_bias, r.log10_bias_ratio);
    const double round_plus = (1.0 - q) * r.v_n + q * s.v_plus;
    const double round_minus = q * s.v_minus;
    r.w_plus = w_minus_next + round_plus;
    r.w_minus = w_minus_next + round_minus;
    w_plus_next = r.w_plus;
    w_minus_next = r.w_minus;
  }
  rep.log10_bias_ratio = min_bias;
  rep.bias_ratio = std::pow(10.0, min_bias);
  const RoundValues& first = rep.rounds.front();
  rep.start_value = 0.5 * (first.w_plus + first.w_minus);

  std::optional<int> battles;
  if (q == 1.0) {
    if (const auto l = min_length(build_family(sub_family(spec.sub)))) battles = n_rounds * *l;
  } else {
    rep.notes.push_back(
        "shock_q < 1: some terminal histories contain no battle, so the minimum-length "
        "bound is vacuous");
  }
  rep.dissipation = make_dissipation(v, rep.start_value, rep.start_value, battles,
                                     balanced_gain_ratio(spec.sf, v));

  for (const RoundValues& r : rep.rounds) {
    rep.trajectory.push_back({r.round, Player::kA, r.w_plus, r.w_minus});
    rep.trajectory.push_back({r.round, Player::kB, r.w_minus, r.w_plus});
  }
  return rep;
}

TransientDominanceReport incumbency_transient_dominance(const IncumbencyReport& report,
                                                        const IncumbencySpec& spec,
                                                        double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw DomainError("transient_dominance: epsilon must lie in (0, 1/4)");
  }
  validate(spec);
  if (static_cast<int>(report.rounds.size()) != spec.rounds) {
    throw DomainError("incumbency report does not match the spec");
  }
  const double v = spec.prize;
  const double q = spec.shock_q;
  TransientDominanceReport rep;
  rep.epsilon = epsilon;
  std::vector<char> weak(report.rounds.size(), 0);
  for (const RoundValues& r : report.rounds) {
    if (r.w_minus > epsilon * v) continue;
    weak[static_cast<std::size_t>(r.round - 1)] = 1;
    rep.max_weak_value = std::max(rep.max_weak_value, r.w_minus);
    // Ids encode (round, laggard): 2 (n - 1) for A trailing, 2 (n - 1) + 1 for B.
    const auto base = static_cast<StateId>(2 * (r.round - 1));
    rep.set_a_minus.push_back(base);
    rep.labels_a_minus.push_back("round " + std::to_string(r.round) + ", A trails");
    rep.set_b_minus.push_back(base + 1);
    rep.labels_b_minus.push_back("round " + std::to_string(r.round) + ", B trails");
  }
  // mass[flip][bits]: flip = incumbent differs from the round-1 incumbent;
  // bit 0 = round-1 laggard has trailed in a weak round, bit 1 = the other.
  double mass[2][4] = {{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}};
  for (const RoundValues& r : report.rounds) {
    double next[2][4] = {};
    const double flip = q * r.upset;
    for (int f = 0; f < 2; ++f) {
      for (int bits = 0; bits < 4; ++bits) {
        const double m = mass[f][bits];
        if (m == 0.0) continue;
        const int marked = weak[static_cast<std::size_t>(r.round - 1)] ? bits | (1 << f) : bits;
        next[f][marked] += m * (1.0 - flip);
        next[1 - f][marked] += m * flip;
      }
    }
    std::copy(&next[0][0], &next[0][0] + 8, &mass[0][0]);
  }
  rep.reach_both_prob = std::clamp(mass[0][3] + mass[1][3], 0.0, 1.0);
  rep.measured_effort = report.dissipation.total_effort;
  rep.satisfied = !rep.set_a_minus.empty() && rep.reach_both_prob >= 1.0 - epsilon;
  if (rep.satisfied) {
    rep.implied_effort_floor = (1.0 - 4.0 * epsilon) * v;
    rep.floor_holds = rep.measured_effort >= rep.implied_effort_floor;
  }
  return rep;
}

int rounds_for_reach(double upset, double shock_q, double epsilon) {
  const double stay = 1.0 - shock_q * upset;
  if (!(stay < 1.0)) throw DomainError("rounds_for_reach: the lead never changes hands");
  if (stay <= 0.0) return 2;
  return 1 + static_cast<int>(std::ceil(std::log(epsilon) / std::log(stay)));
}

}  // namespace contest
