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

#include "contest/metrics.hpp"

#include <omp.h>

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "contest/error.hpp"
#include "detail/wide.hpp"

namespace contest {
namespace {

using detail::lg;
using detail::Wide;
using detail::wide_inverse;
using detail::widen_exponent_range;
namespace mp = boost::multiprecision;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solves x = P x + b over the listed unknowns with SparseLU.
Eigen::VectorXd solve_absorption(const std::vector<Eigen::Triplet<double>>& p_entries,
                                 const Eigen::VectorXd& rhs) {
  const auto n = rhs.size();
  Eigen::SparseMatrix<double> a(n, n);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(p_entries.size() + n);
  for (Eigen::Index i = 0; i < n; ++i) entries.emplace_back(i, i, 1.0);
  for (const auto& t : p_entries) entries.emplace_back(t.row(), t.col(), -t.value());
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw DegenerateChainError("absorption system is singular; play can continue forever");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw DegenerateChainError("absorption solve failed");
  }
  return x;
}

// Positive-probability successors of s under equilibrium play.
template <class Fn>
void for_each_move(const ContestAutomaton& m, const ValueSolution& sol, StateId s, Fn&& fn) {
  const double pa = sol.states[s].win_prob_a;
  for (Player w : {Player::kA, Player::kB}) {
    const double pw = w == Player::kA ? pa : 1.0 - pa;
    if (pw <= 0.0) continue;
    for (const auto& b : m.next(s, w)) fn(b.to, pw * b.prob);
  }
}

void require_absorbed(const ContestAutomaton& m, const ValueSolution& sol) {
  std::vector<std::vector<StateId>> preds(m.size());
  std::deque<StateId> queue;
  std::vector<char> ok(m.size(), 0);
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) {
      ok[s] = 1;
      queue.push_back(s);
      continue;
    }
    for_each_move(m, sol, s, [&](StateId t, double) { preds[t].push_back(s); });
  }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (StateId p : preds[s]) {
      if (!ok[p]) {
        ok[p] = 1;
        queue.push_back(p);
      }
    }
  }
  for (StateId s = 0; s < m.size(); ++s) {
    if (!ok[s]) {
      throw DegenerateChainError("state '" + m.label(s) +
                                 "' is never absorbed under equilibrium play");
    }
  }
}

void check_solution(const ValueSolution& sol, const ContestSpec& spec) {
  if (sol.states.size() != spec.automaton.size()) {
    throw DomainError("solution does not match the contest automaton");
  }
}

}  // namespace

// ---- dissipation ----------------------------------------------------------

DissipationReport make_dissipation(double prize, double v0_a, double v0_b,
                                   std::optional<int> min_len, double balanced_gain) {
  DissipationReport r;
  r.prize = prize;
  r.v0_a = v0_a;
  r.v0_b = v0_b;
  r.total_effort = prize - v0_a - v0_b;
  r.dissipation_ratio = r.total_effort / prize;
  r.min_length = min_len;
  r.balanced_gain = balanced_gain;
  if (min_len) {
    r.thm1_bound = 1.0 - std::pow(balanced_gain, *min_len);
    r.bound_satisfied = r.dissipation_ratio < r.thm1_bound;
  } else {
    // No finite battle count to lean on: the bound degenerates to 1.
    r.thm1_bound = 1.0;
    r.bound_satisfied = r.dissipation_ratio < 1.0;
  }
  return r;
}

DissipationReport rent_dissipation(const ValueSolution& sol, const ContestSpec& spec) {
  check_solution(sol, spec);
  return make_dissipation(spec.prize, sol.v0_a(), sol.v0_b(), min_length(spec.automaton),
                          balanced_gain_ratio(spec.sf, spec.prize));
}

// ---- win probabilities ----------------------------------------------------

WinProbabilities win_probabilities(const ValueSolution& sol, const ContestSpec& spec) {
  check_solution(sol, spec);
  const auto& m = spec.automaton;
  require_absorbed(m, sol);
  std::vector<Eigen::Index> slot(m.size(), -1);
  Eigen::Index n = 0;
  for (StateId s = 0; s < m.size(); ++s) {
    if (!m.is_terminal(s)) slot[s] = n++;
  }
  std::vector<Eigen::Triplet<double>> p;
  Eigen::VectorXd ra = Eigen::VectorXd::Zero(n), rb = Eigen::VectorXd::Zero(n);
  for (StateId s = 0; s < m.size(); ++s) {
    if (slot[s] < 0) continue;
    for_each_move(m, sol, s, [&](StateId t, double w) {
      if (const auto win = m.winner(t)) {
        (*win == Player::kA ? ra : rb)[slot[s]] += w;
      } else {
        p.emplace_back(slot[s], slot[t], w);
      }
    });
  }
  const Eigen::VectorXd xa = solve_absorption(p, ra);
  const Eigen::VectorXd xb = solve_absorption(p, rb);
  WinProbabilities out;
  out.q_a.resize(m.size());
  out.q_b.resize(m.size());
  for (StateId s = 0; s < m.size(); ++s) {
    if (const auto win = m.winner(s)) {
      out.q_a[s] = *win == Player::kA ? 1.0 : 0.0;
      out.q_b[s] = 1.0 - out.q_a[s];
    } else {
      out.q_a[s] = xa[slot[s]];
      out.q_b[s] = xb[slot[s]];
      if (std::abs(out.q_a[s] + out.q_b[s] - 1.0) > 1e-9) {
        throw DegenerateChainError("absorption probabilities do not sum to one");
      }
    }
  }
  return out;
}

// ---- advantage profile ----------------------------------------------------

namespace {

AdvantageProfile plain_tow_profile(int n, const SuccessFunctionSpec& sf) {
  widen_exponent_range();
  const detail::HomogeneousGain<Wide> g(sf);
  const auto inc = detail::tow_increments(g, n, 0.0, wide_inverse(g));
  const auto inc_at = [&](int j) -> const Wide& { return j >= 1 ? inc.d[j - 1] : inc.e[-j]; };
  const auto stake = [&](int i) { return Wide(inc_at(i) + inc_at(i + 1)); };

  AdvantageProfile prof;
  prof.family = Family::kTugOfWar;
  prof.size = n;
  // Battle odds r_k = (1 - p_k) / p_k and gain odds (1 - pi_k) / pi_k.
  std::vector<Wide> win_odds(2 * n + 1), gain(2 * n + 1), gain_odds(2 * n + 1);
  for (int i = -n + 1; i < n; ++i) {
    const Wide theta = stake(i) / stake(-i);
    const auto hi = g.eval(theta);
    const auto lo = g.eval(Wide(1) / theta);
    win_odds[i + n] = lo.gamma / hi.gamma;
    gain[i + n] = hi.phi;
    gain_odds[i + n] = hi.phi_c / hi.phi;
  }
  // Gambler's ruin: d_j = prod_{k=-N+1}^{j} r_k, j = -N..N-1.
  std::vector<Wide> d(2 * n);
  Wide run = 1;
  for (int j = -n; j < n; ++j) {
    if (j > -n) run *= win_odds[j + n];
    d[j + n] = run;
  }
  std::vector<Wide> below(2 * n + 1, Wide(0)), above(2 * n + 1, Wide(0));
  for (int i = -n + 1; i <= n; ++i) below[i + n] = below[i - 1 + n] + d[i - 1 + n];
  for (int i = n - 1; i >= -n; --i) above[i + n] = above[i + 1 + n] + d[i + n];
  const Wide total = below[2 * n];
  // Tails T(i) = sum_{j=i+1}^{N} inc(j), so v - V(i) = T(i) / span.
  std::vector<Wide> tail(2 * n + 1, Wide(0));
  for (int i = n - 1; i >= -n; --i) tail[i + n] = tail[i + 1 + n] + inc_at(i + 1);

  for (int i = -n + 1; i < n; ++i) {
    AdvantageRow row;
    row.coord = i;
    const Wide q = below[i + n] / total;
    const Wide q_c = above[i + n] / total;
    row.q = static_cast<double>(q);
    row.one_minus_q = static_cast<double>(q_c);
    row.log10_one_minus_q = lg(q_c);
    row.gain_ratio = static_cast<double>(gain[i + n]);
    row.log10_odds = lg(gain_odds[i + n]);
    if (i + 1 < n) {
      const Wide ratio = tail[i + 1 + n] / tail[i + n];
      row.tail_ratio = static_cast<double>(ratio);
      row.log10_tail_ratio = lg(ratio);
      Wide s = 0, prod = 1;
      for (int j = i + 1; j < n; ++j) {
        prod *= gain_odds[j + n];
        s += prod;
      }
      const Wide predicted = s / (1 + s);
      row.tail_identity_residual = static_cast<double>(mp::abs(ratio / predicted - 1));
    }
    prof.rows.push_back(row);
  }
  for (int i0 = 0; i0 + 1 < n; ++i0) {
    bool ok = true;
    double worst = -kInf;
    for (int k = i0 + 1; k < n; ++k) {
      const double lo = lg(gain_odds[k + n]);
      ok = ok && lo < 0.0;
      worst = std::max(worst, lo);
    }
    if (ok) {
      prof.tail_start = i0;
      prof.log10_tail_bound = worst;
      break;
    }
  }
  return prof;
}

}  // namespace

AdvantageProfile advantage_profile(const FamilyParams& fp, const SuccessFunctionSpec& sf,
                                   double prize) {
  if (fp.family != Family::kTugOfWar && fp.family != Family::kConsecutiveWin) {
    throw DomainError("advantage_profile: tug-of-war or consecutive-win only");
  }
  if (fp.family == Family::kTugOfWar && fp.reset_p == 0.0 && sf.is_homogeneous()) {
    return plain_tow_profile(fp.size, sf);
  }
  FamilyParams centred = fp;
  centred.head_start = 0;
  const ContestSpec spec(build_family(centred), sf, prize);
  const ValueSolution sol = solve_family(centred, sf, prize);
  const WinProbabilities q = win_probabilities(sol, spec);
  AdvantageProfile prof;
  prof.family = fp.family;
  prof.size = fp.size;
  const auto& m = spec.automaton;
  std::vector<StateId> by_coord(2 * fp.size + 1);
  for (StateId s = 0; s < m.size(); ++s) by_coord[*m.state(s).coord + fp.size] = s;
  for (int i = -fp.size + 1; i < fp.size; ++i) {
    const StateId s = by_coord[i + fp.size];
    const StateValue& st = sol.states[s];
    const BattleEquilibrium eq = stage_battle(sf, st.stake_a, st.stake_b);
    AdvantageRow row;
    row.coord = i;
    row.q = q.q_a[s];
    row.one_minus_q = q.q_b[s];
    row.log10_one_minus_q = std::log10(q.q_b[s]);
    row.gain_ratio = eq.gain_ratio_a;
    row.log10_odds = std::log10((1.0 - eq.gain_ratio_a) / eq.gain_ratio_a);
    if (fp.family == Family::kTugOfWar && fp.reset_p == 0.0 && i + 1 < fp.size) {
      const double num = prize - sol.states[by_coord[i + 1 + fp.size]].value_a;
      const double den = prize - st.value_a;
      row.tail_ratio = num / den;
      row.log10_tail_ratio = std::log10(num / den);
    }
    prof.rows.push_back(row);
  }
  return prof;
}

// ---- self-reinforcement ---------------------------------------------------

namespace {

// log10 of (1 - pi(1/theta)) / pi(theta) - 1, with `at` evaluated at theta
// and `mirror` at 1/theta. The numerator 1 - phi(theta) - phi(1/theta) is
// taken from whichever side keeps both terms small.
double excess(const detail::HomogeneousGain<Wide>::Eval& at,
              const detail::HomogeneousGain<Wide>::Eval& mirror) {
  const Wide gap = at.gamma >= mirror.gamma ? Wide(at.phi_c - mirror.phi)
                                            : Wide(mirror.phi_c - at.phi);
  if (gap <= 0) return -kInf;
  return lg(Wide(gap / at.phi));
}

}  // namespace

std::vector<ReinforcementRow> tow_self_reinforcement(int margin, const SuccessFunctionSpec& sf) {
  if (margin < 2) return {};
  widen_exponent_range();
  const detail::HomogeneousGain<Wide> g(sf);
  const int n = margin;
  const auto inc = detail::tow_increments(g, n, 0.0, wide_inverse(g));
  const auto inc_at = [&](int j) -> const Wide& { return j >= 1 ? inc.d[j - 1] : inc.e[-j]; };
  // A's stake at i; B's stake at i equals A's stake at -i.
  const auto delta = [&](int i) { return Wide(inc_at(i) + inc_at(i + 1)); };
  const auto pi = [&](int i) { return g.eval(Wide(delta(i) / delta(-i))); };
  std::vector<ReinforcementRow> rows;
  for (int i = -(n - 2); i <= n - 2; ++i) {
    const Wide lhs = delta(i + 1) / delta(-i - 1);
    const auto a = pi(-(i + 1));
    const auto b = pi(i + 1);
    const auto c = pi(i);
    const auto d = pi(-i);
    const Wide f1 = a.phi_c / b.phi;
    const Wide f2 = c.phi_c / d.phi;
    const Wide rhs = f1 * f2 * delta(i) / delta(-i);
    ReinforcementRow row;
    row.i = i;
    row.log10_lhs = lg(lhs);
    row.log10_factors = {lg(f1), lg(f2)};
    row.log10_factor_excess = {excess(b, a), excess(d, c)};
    row.rel_residual = static_cast<double>(mp::abs(lhs / rhs - 1));
    rows.push_back(row);
  }
  return rows;
}

std::vector<ReinforcementRow> cw_self_reinforcement(int k, const SuccessFunctionSpec& sf) {
  if (k < 2) return {};
  widen_exponent_range();
  const detail::HomogeneousGain<Wide> g(sf);
  const auto iterate = [&](Wide r) {
    for (int t = 0; t < k - 1; ++t) r = g.psi(r);
    return r;
  };
  Wide lo = 1, hi = 2;
  while (iterate(hi) < 1) hi *= 2;
  for (int it = 0; it < 400 && hi - lo > Wide("1e-36") * hi; ++it) {
    const Wide mid = (lo + hi) / 2;
    (iterate(mid) < 1 ? lo : hi) = mid;
  }
  const Wide rho = (lo + hi) / 2;
  Wide p_k = 1, r = rho;
  for (int t = 0; t + 2 <= k; ++t) {
    p_k *= g.eval(Wide(1) / r).phi_c;
    r = g.psi(r);
  }
  const Wide w = 1 / (1 + rho - p_k);
  const Wide u = 1 - rho * w;
  std::vector<Wide> v(2 * k + 1);
  Wide a = 0, b = 1;
  v[0] = a;
  v[2 * k] = b;
  for (int j = 1; j < k; ++j) {
    const Wide ga = w - a;
    const Wide gb = b - u;
    const Wide na = a + ga * g.eval(Wide(ga / gb)).phi;
    const Wide nb = u + gb * g.eval(Wide(gb / ga)).phi;
    a = na;
    b = nb;
    v[j] = a;
    v[2 * k - j] = b;
  }
  v[k] = u + g.eval(Wide(1)).phi * (w - u);
  const auto at = [&](int i) -> const Wide& { return v[i + k]; };
  // A's stake at streak i: winning moves to max(i,0)+1, losing to min(i,0)-1.
  const auto delta = [&](int i) {
    return Wide(at(i >= 0 ? i + 1 : 1) - at(i <= 0 ? i - 1 : -1));
  };
  const auto pi = [&](int i) { return g.eval(Wide(delta(i) / delta(-i))); };
  std::vector<ReinforcementRow> rows;
  for (int i = 0; i <= k - 2; ++i) {
    const Wide lhs = delta(i + 1) / delta(-i - 1);
    const auto a = pi(-i - 1);
    const auto b = pi(i + 1);
    const Wide f = a.phi_c / b.phi;
    const Wide rhs = f * delta(i) / delta(-i);
    ReinforcementRow row;
    row.i = i;
    row.log10_lhs = lg(lhs);
    row.log10_factors = {lg(f)};
    row.log10_factor_excess = {excess(b, a)};
    row.rel_residual = static_cast<double>(mp::abs(lhs / rhs - 1));
    rows.push_back(row);
  }
  return rows;
}

// ---- transient dominance --------------------------------------------------

TransientDominanceReport transient_dominance(const ValueSolution& sol, const ContestSpec& spec,
                                             double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw DomainError("transient_dominance: epsilon must lie in (0, 1/4)");
  }
  check_solution(sol, spec);
  const auto& m = spec.automaton;
  const double v = spec.prize;
  TransientDominanceReport rep;
  rep.epsilon = epsilon;
  std::vector<unsigned> mask(m.size(), 0);
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) continue;
    if (sol.states[s].value_a <= epsilon * v) {
      mask[s] |= 1u;
      rep.set_a_minus.push_back(s);
      rep.labels_a_minus.push_back(m.label(s));
      rep.max_weak_value = std::max(rep.max_weak_value, sol.states[s].value_a);
    }
    if (sol.states[s].value_b <= epsilon * v) {
      mask[s] |= 2u;
      rep.set_b_minus.push_back(s);
      rep.labels_b_minus.push_back(m.label(s));
      rep.max_weak_value = std::max(rep.max_weak_value, sol.states[s].value_b);
    }
  }
  rep.measured_effort = v - sol.v0_a() - sol.v0_b();

  if (!rep.set_a_minus.empty() && !rep.set_b_minus.empty()) {
    // Augmented chain over (state, visited-bits); bits == 3 is success.
    const auto key = [&](StateId s, unsigned bits) { return s * 3 + bits; };
    std::vector<Eigen::Index> slot(m.size() * 3, -1);
    Eigen::Index n = 0;
    for (StateId s = 0; s < m.size(); ++s) {
      if (m.is_terminal(s)) continue;
      for (unsigned bits = 0; bits < 3; ++bits) {
        if ((bits | mask[s]) == bits) slot[key(s, bits)] = n++;
      }
    }
    std::vector<Eigen::Triplet<double>> p;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (StateId s = 0; s < m.size(); ++s) {
      if (m.is_terminal(s)) continue;
      for (unsigned bits = 0; bits < 3; ++bits) {
        const Eigen::Index row = slot[key(s, bits)];
        if (row < 0) continue;
        for_each_move(m, sol, s, [&](StateId t, double w) {
          if (m.is_terminal(t)) return;
          const unsigned nb = bits | mask[t];
          if (nb == 3u) {
            rhs[row] += w;
          } else {
            p.emplace_back(row, slot[key(t, nb)], w);
          }
        });
      }
    }
    const unsigned start_bits = mask[m.start()];
    if (start_bits == 3u) {
      rep.reach_both_prob = 1.0;
    } else {
      require_absorbed(m, sol);
      const Eigen::VectorXd x = solve_absorption(p, rhs);
      rep.reach_both_prob = std::clamp(x[slot[key(m.start(), start_bits)]], 0.0, 1.0);
    }
  }
  rep.satisfied = !rep.set_a_minus.empty() && !rep.set_b_minus.empty() &&
                  rep.reach_both_prob >= 1.0 - epsilon;
  if (rep.satisfied) {
    rep.implied_effort_floor = (1.0 - 4.0 * epsilon) * v;
    rep.floor_holds = rep.measured_effort >= rep.implied_effort_floor;
  }
  return rep;
}

TransientDominanceReport transient_dominance_search(const ValueSolution& sol,
                                                    const ContestSpec& spec) {
  double lo = 0.0;
  double hi = 0.25 * (1.0 - 1e-12);
  TransientDominanceReport best = transient_dominance(sol, spec, hi);
  if (best.satisfied) {
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      TransientDominanceReport r = transient_dominance(sol, spec, mid);
      if (r.satisfied) {
        hi = mid;
        best = std::move(r);
      } else {
        lo = mid;
      }
    }
  }
  best.searched = true;
  return best;
}

// ---- sweeps ---------------------------------------------------------------

SweepTable sweep(const FamilyParams& base, int lo, int hi, const SuccessFunctionSpec& sf,
                 double prize, const CyclicOptions& opts, bool parallel) {
  if (hi < lo) throw DomainError("sweep: empty parameter range");
  SweepTable table;
  table.base = base;
  table.sf = sf.to_string();
  table.prize = prize;
  table.rows.resize(static_cast<std::size_t>(hi - lo + 1));
  const double pi1 = balanced_gain_ratio(sf, prize);
  const int cap = thread_cap_from_env();
  const int threads = parallel ? (cap > 0 ? cap : omp_get_max_threads()) : 1;
  const auto count = static_cast<std::ptrdiff_t>(table.rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    SweepRow& row = table.rows[r];
    row.param = lo + static_cast<int>(r);
    try {
      FamilyParams fp = base;
      fp.size = row.param;
      CyclicOptions inner = opts;
      inner.parallel = false;
      const ValueSolution sol = solve_family(fp, sf, prize, inner);
      const DissipationReport d =
          make_dissipation(prize, sol.v0_a(), sol.v0_b(), min_length(build_family(fp)), pi1);
      row.v0_a = d.v0_a;
      row.v0_b = d.v0_b;
      row.total_effort = d.total_effort;
      row.dissipation = d.dissipation_ratio;
      row.thm1_bound = d.thm1_bound;
      row.min_length = d.min_length;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return table;
}

double geometric_tail_limit(const std::vector<double>& values, int window) {
  if (values.size() < 3) throw DomainError("geometric_tail_limit: need at least 3 values");
  const int n = static_cast<int>(values.size());
  const int w = std::min(window, n - 1);
  double worst = 0.0;
  for (int k = n - w + 1; k < n; ++k) {
    const double prev = values[k - 1] - values[k - 2];
    const double cur = values[k] - values[k - 1];
    if (prev <= 0.0) {
      if (cur > 0.0) return kInf;
      continue;
    }
    worst = std::max(worst, cur / prev);
  }
  if (worst >= 1.0) return kInf;
  const double last = values[n - 1] - values[n - 2];
  return values[n - 1] + std::max(last, 0.0) * worst / (1.0 - worst);
}

TowPlateau tow_plateau(int n_max, double reset_p, const SuccessFunctionSpec& sf) {
  if (n_max < 3) throw DomainError("tow_plateau: need at least margin 3");
  widen_exponent_range();
  const detail::HomogeneousGain<Wide> g(sf);
  const auto inc = detail::tow_increments(g, n_max, reset_p, wide_inverse(g));
  TowPlateau out;
  std::vector<Wide> up(n_max + 1, Wide(0)), down(n_max + 1, Wide(0));
  for (int j = 1; j <= n_max; ++j) {
    up[j] = up[j - 1] + inc.d[j - 1];
    down[j] = down[j - 1] + inc.e[j - 1];
  }
  for (int n = 1; n <= n_max; ++n) {
    out.dissipation.push_back(static_cast<double>(1 - 2 * down[n] / (up[n] + down[n])));
  }
  // diss(N+1) - diss(N) = 2 (M_N D_{N+1} - P_N E_{N+1}) / (S_N S_{N+1}).
  for (int n = 1; n < n_max; ++n) {
    const Wide gain_side = down[n] * inc.d[n];
    const Wide loss_side = up[n] * inc.e[n];
    const Wide scale = (up[n] + down[n]) * (up[n + 1] + down[n + 1]);
    const int sign = gain_side > loss_side ? 1 : (gain_side < loss_side ? -1 : 0);
    out.increment_sign.push_back(sign);
    out.log10_increment.push_back(sign == 0 ? -kInf
                                            : lg(Wide(2 * mp::abs(gain_side - loss_side) / scale)));
  }
  out.increments_positive = std::all_of(out.increment_sign.begin(), out.increment_sign.end(),
                                        [](int s) { return s > 0; });
  out.increments_shrinking = true;
  for (std::size_t k = 1; k < out.log10_increment.size(); ++k) {
    out.increments_shrinking =
        out.increments_shrinking && out.log10_increment[k] < out.log10_increment[k - 1];
  }
  // Geometric tail over the last five increments, with the largest ratio.
  const std::size_t m = out.log10_increment.size();
  const std::size_t w = std::min<std::size_t>(5, m);
  double worst_log_ratio = -kInf;
  for (std::size_t k = m - w + 1; k < m; ++k) {
    worst_log_ratio =
        std::max(worst_log_ratio, out.log10_increment[k] - out.log10_increment[k - 1]);
  }
  const double last = out.dissipation.back();
  if (!out.increments_positive || worst_log_ratio >= 0.0) {
    out.extrapolated_supremum = kInf;
  } else {
    const double ratio = std::pow(10.0, worst_log_ratio);
    const double tail = std::pow(10.0, out.log10_increment.back()) * ratio / (1.0 - ratio);
    out.extrapolated_supremum = last + tail;
  }
  out.margin_below_one = 1.0 - out.extrapolated_supremum;
  return out;
}

}  // namespace contest
