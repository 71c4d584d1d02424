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

#include "contest/solver.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "contest/error.hpp"
#include "contest/rootfind.hpp"
#include "detail/gain_math.hpp"

namespace contest {
namespace {

void terminal_values(const ContestAutomaton& m, double prize, std::vector<double>& va,
                     std::vector<double>& vb) {
  for (StateId s = 0; s < m.size(); ++s) {
    if (const auto w = m.winner(s)) {
      va[s] = *w == Player::kA ? prize : 0.0;
      vb[s] = *w == Player::kB ? prize : 0.0;
    }
  }
}

// States from which every path stays inside an acyclic region, in an order
// where successors come first.
std::vector<StateId> settled_order(const ContestAutomaton& m) {
  std::vector<int> pending(m.size(), 0);
  std::vector<std::vector<StateId>> preds(m.size());
  std::deque<StateId> ready;
  for (StateId s = 0; s < m.size(); ++s) {
    for (const auto& out : m.outcomes()[s]) {
      for (const auto& b : out) {
        ++pending[s];
        preds[b.to].push_back(s);
      }
    }
    if (pending[s] == 0) ready.push_back(s);
  }
  std::vector<StateId> order;
  while (!ready.empty()) {
    const StateId s = ready.front();
    ready.pop_front();
    if (!m.is_terminal(s)) order.push_back(s);
    for (StateId p : preds[s]) {
      if (--pending[p] == 0) ready.push_back(p);
    }
  }
  return order;
}

void require_absorbing(const ContestAutomaton& m) {
  std::vector<std::vector<StateId>> preds(m.size());
  std::deque<StateId> queue;
  std::vector<char> reaches(m.size(), 0);
  for (StateId s = 0; s < m.size(); ++s) {
    for (const auto& out : m.outcomes()[s]) {
      for (const auto& b : out) preds[b.to].push_back(s);
    }
    if (m.is_terminal(s)) {
      reaches[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (StateId p : preds[s]) {
      if (!reaches[p]) {
        reaches[p] = 1;
        queue.push_back(p);
      }
    }
  }
  for (StateId s = 0; s < m.size(); ++s) {
    if (!reaches[s]) {
      throw StructureError("state '" + m.label(s) + "' cannot reach a terminal state");
    }
  }
}

void require_homogeneous(const SuccessFunctionSpec& sf, const char* what) {
  if (!sf.is_homogeneous()) {
    throw UnsupportedKindError(std::string(what) + ": closed form needs a homogeneous SF");
  }
}

// V_A over coordinates -K..K (index i + K) mapped onto the family automaton,
// with V_B(i) = V_A(-i).
ValueSolution from_coordinates(const ContestSpec& spec, const std::vector<double>& by_coord,
                               int half, SolveMethod method) {
  const auto& m = spec.automaton;
  std::vector<double> va(m.size()), vb(m.size());
  for (StateId s = 0; s < m.size(); ++s) {
    const int c = m.state(s).coord.value();
    va[s] = by_coord[c + half];
    vb[s] = by_coord[half - c];
  }
  return complete_solution(spec, std::move(va), std::move(vb), method, 0);
}

}  // namespace

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::kBackward:
      return "backward";
    case SolveMethod::kClosedTow:
      return "closed_tow";
    case SolveMethod::kClosedCw:
      return "closed_cw";
    case SolveMethod::kFixedPoint:
      return "fixed_point";
  }
  return "unknown";
}

std::vector<double> ValueSolution::values_a() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.value_a);
  return out;
}

std::vector<double> ValueSolution::values_b() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.value_b);
  return out;
}

double residual(const ContestSpec& spec, const std::vector<double>& va,
                const std::vector<double>& vb) {
  const auto& m = spec.automaton;
  if (va.size() != m.size() || vb.size() != m.size()) {
    throw DomainError("residual: value vectors do not match the automaton");
  }
  std::vector<double> a = va, b = vb;
  terminal_values(m, spec.prize, a, b);
  const FlatAutomaton flat(m);
  double worst = 0.0;
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) continue;
    const StateValue u = bellman_update(flat, spec.sf, a, b, s);
    worst = std::max({worst, std::abs(u.value_a - a[s]), std::abs(u.value_b - b[s])});
  }
  return worst;
}

double residual(const ContestSpec& spec, const ValueSolution& sol) {
  return residual(spec, sol.values_a(), sol.values_b());
}

ValueSolution complete_solution(const ContestSpec& spec, std::vector<double> va,
                                std::vector<double> vb, SolveMethod method, long iterations) {
  const auto& m = spec.automaton;
  terminal_values(m, spec.prize, va, vb);
  const FlatAutomaton flat(m);
  ValueSolution sol;
  sol.method = method;
  sol.prize = spec.prize;
  sol.iterations = iterations;
  sol.start = m.start();
  sol.states.resize(m.size());
  for (StateId s = 0; s < m.size(); ++s) {
    StateValue& out = sol.states[s];
    if (m.is_terminal(s)) {
      out.value_a = va[s];
      out.value_b = vb[s];
      out.win_prob_a = *m.winner(s) == Player::kA ? 1.0 : 0.0;
      continue;
    }
    out = bellman_update(flat, spec.sf, va, vb, s);
    sol.residual = std::max(
        {sol.residual, std::abs(out.value_a - va[s]), std::abs(out.value_b - vb[s])});
    out.value_a = va[s];
    out.value_b = vb[s];
  }
  return sol;
}

ValueSolution solve_finite(const ContestSpec& spec) {
  const auto& m = spec.automaton;
  const auto order = topological_order(m);  // throws CycleError on cyclic rules
  std::vector<double> va(m.size(), 0.0), vb(m.size(), 0.0);
  terminal_values(m, spec.prize, va, vb);
  const FlatAutomaton flat(m);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (m.is_terminal(*it)) continue;
    const StateValue u = bellman_update(flat, spec.sf, va, vb, *it);
    va[*it] = u.value_a;
    vb[*it] = u.value_b;
  }
  return complete_solution(spec, std::move(va), std::move(vb), SolveMethod::kBackward, 1);
}

namespace {

// One Newton step on F(V) = T(V) - V over the nonterminal values, with a
// sparse forward-difference Jacobian: T at s only reads the successors of s,
// so perturbing V(t) touches the predecessors of t alone. Returns false when
// the linearization is singular.
bool newton_step(const ContestAutomaton& m, const FlatAutomaton& flat,
                 const SuccessFunctionSpec& sf, double prize, std::vector<double>& va,
                 std::vector<double>& vb) {
  std::vector<Eigen::Index> slot(m.size(), -1);
  Eigen::Index n = 0;
  for (StateId s = 0; s < m.size(); ++s) {
    if (!m.is_terminal(s)) slot[s] = n++;
  }
  std::vector<std::vector<StateId>> preds(m.size());
  for (StateId s = 0; s < m.size(); ++s) {
    if (slot[s] < 0) continue;
    for (std::size_t k = flat.row[2 * s]; k < flat.row[2 * s + 2]; ++k) {
      auto& p = preds[flat.to[k]];
      if (p.empty() || p.back() != s) p.push_back(s);
    }
  }
  std::vector<StateValue> base(m.size());
  Eigen::VectorXd f(2 * n);
  for (StateId s = 0; s < m.size(); ++s) {
    if (slot[s] < 0) continue;
    base[s] = bellman_update(flat, sf, va, vb, s);
    f[2 * slot[s]] = base[s].value_a - va[s];
    f[2 * slot[s] + 1] = base[s].value_b - vb[s];
  }
  std::vector<Eigen::Triplet<double>> jac;
  for (StateId t = 0; t < m.size(); ++t) {
    if (slot[t] < 0) continue;
    for (int who = 0; who < 2; ++who) {
      std::vector<double>& vec = who == 0 ? va : vb;
      const Eigen::Index col = 2 * slot[t] + who;
      const double keep = vec[t];
      // Step sized to the smallest gap to a neighbour: deep states have
      // stakes far below the prize.
      double gap = prize;
      const auto near = [&](StateId u) {
        const double g = std::abs(vec[u] - keep);
        if (g > 0.0) gap = std::min(gap, g);
      };
      for (StateId s : preds[t]) near(s);
      for (std::size_t k = flat.row[2 * t]; k < flat.row[2 * t + 2]; ++k) near(flat.to[k]);
      const double h = std::max(1e-6 * gap, 8.0 * std::numeric_limits<double>::epsilon() *
                                                std::max(prize, std::abs(keep)));
      vec[t] = keep + h;
      jac.emplace_back(col, col, -1.0);
      for (StateId s : preds[t]) {
        const StateValue u = bellman_update(flat, sf, va, vb, s);
        jac.emplace_back(2 * slot[s], col, (u.value_a - base[s].value_a) / h);
        jac.emplace_back(2 * slot[s] + 1, col, (u.value_b - base[s].value_b) / h);
      }
      vec[t] = keep;
    }
  }
  Eigen::SparseMatrix<double> j(2 * n, 2 * n);
  j.setFromTriplets(jac.begin(), jac.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(j);
  if (lu.info() != Eigen::Success) return false;
  const Eigen::VectorXd dx = lu.solve(-f);
  if (lu.info() != Eigen::Success || !dx.allFinite()) return false;
  for (StateId s = 0; s < m.size(); ++s) {
    if (slot[s] < 0) continue;
    va[s] += dx[2 * slot[s]];
    vb[s] += dx[2 * slot[s] + 1];
  }
  return true;
}

}  // namespace

ValueSolution solve_cyclic(const ContestSpec& spec, const CyclicOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw DomainError("solve_cyclic: damping must lie in (0, 1]");
  }
  if (opts.max_iter < 1) throw DomainError("solve_cyclic: max_iter must be positive");
  const auto& m = spec.automaton;
  require_absorbing(m);
  const double v = spec.prize;
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-12 * v;

  std::vector<double> va(m.size(), 0.0), vb(m.size(), 0.0);
  if (opts.start == CyclicStart::kLinear) {
    const bool ordered = std::all_of(m.states().begin(), m.states().end(),
                                     [](const StateInfo& s) { return s.coord.has_value(); });
    int reach = 1;
    for (const auto& s : m.states()) reach = std::max(reach, ordered ? std::abs(*s.coord) : 0);
    for (StateId s = 0; s < m.size(); ++s) {
      const double c = ordered ? *m.state(s).coord : 0.0;
      va[s] = v * (c + reach) / (2.0 * reach);
      vb[s] = v * (reach - c) / (2.0 * reach);
    }
  }
  terminal_values(m, v, va, vb);

  const FlatAutomaton flat(m);
  // The acyclic tail is solved exactly once; iteration only moves the rest.
  for (StateId s : settled_order(m)) {
    const StateValue u = bellman_update(flat, spec.sf, va, vb, s);
    va[s] = u.value_a;
    vb[s] = u.value_b;
  }

  // Symmetric rules are iterated on symmetric profiles only; rounding drift
  // otherwise lets the iteration slide onto asymmetric fixed points.
  const auto mirror = find_mirror(m);
  const auto symmetrize = [&](std::vector<double>& a, std::vector<double>& b) {
    if (!mirror) return;
    for (StateId s = 0; s < m.size(); ++s) {
      const StateId t = (*mirror)[s];
      const double avg = 0.5 * (a[s] + b[t]);
      a[s] = avg;
      b[t] = avg;
    }
  };
  symmetrize(va, vb);

  std::vector<double> na(m.size()), nb(m.size());
  const auto sweep = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return opts.parallel ? bellman_sweep_parallel(flat, spec.sf, opts.damping, a, b, na, nb)
                         : bellman_sweep_serial(flat, spec.sf, opts.damping, a, b, na, nb);
  };
  long it = 0;
  for (;;) {
    double r = sweep(va, vb);
    ++it;
    if (!std::isfinite(r)) throw ConvergenceError("solve_cyclic: iteration diverged", r, it);
    if (r <= tol) break;
    if (it >= opts.max_iter) {
      throw ConvergenceError("solve_cyclic: iteration limit reached", r, it);
    }
    if (opts.polish_every > 0 && it % opts.polish_every == 0 && r < 1e-4 * v) {
      std::vector<double> ca = va, cb = vb;
      if (newton_step(m, flat, spec.sf, v, ca, cb)) {
        // Backtrack along the Newton direction until the residual drops.
        const auto keep_a = na, keep_b = nb;
        std::vector<double> ta(m.size()), tb(m.size());
        bool taken = false;
        for (double lam = 1.0; lam > 1e-3 && !taken; lam *= 0.25) {
          for (StateId s = 0; s < m.size(); ++s) {
            ta[s] = va[s] + lam * (ca[s] - va[s]);
            tb[s] = vb[s] + lam * (cb[s] - vb[s]);
          }
          symmetrize(ta, tb);
          const double rc = sweep(ta, tb);
          ++it;
          if (std::isfinite(rc) && rc < r) {
            va.swap(ta);
            vb.swap(tb);
            taken = true;
            r = rc;
          }
        }
        if (taken && r <= tol) break;
        if (!taken) {
          na = keep_a;
          nb = keep_b;
        }
      }
    }
    symmetrize(na, nb);
    va.swap(na);
    vb.swap(nb);
  }
  return complete_solution(spec, std::move(va), std::move(vb), SolveMethod::kFixedPoint, it);
}

ValueSolution solve(const ContestSpec& spec, const CyclicOptions& opts) {
  return is_acyclic(spec.automaton) ? solve_finite(spec) : solve_cyclic(spec, opts);
}

// ---- tug-of-war -----------------------------------------------------------

ValueSolution solve_tow_closed(int margin, double reset_p, int head_start,
                               const SuccessFunctionSpec& sf, double prize, TowTrace* trace) {
  require_homogeneous(sf, "solve_tow_closed");
  const ContestSpec spec(build_tug_of_war(margin, reset_p, head_start), sf, prize);
  const int n = margin;
  const double p = reset_p;
  const detail::HomogeneousGain<double> gain(sf);
  const auto inc = detail::tow_increments(gain, n, p, [&](double y) {
    if (!(y < 1e290)) return std::numeric_limits<double>::infinity();
    try {
      return psi_inverse(sf, y);
    } catch (const DomainError& e) {
      throw ConvergenceError(std::string("solve_tow_closed: ") + e.what(), y, 0);
    }
  });
  const double span = inc.up_total + inc.down_total;
  // inc_at(j): increment between coordinates j-1 and j.
  const auto inc_at = [&](int j) { return j >= 1 ? inc.d[j - 1] : inc.e[-j]; };

  // Intermediate-node values from partial sums, accumulated from the ends
  // so that tiny tails keep their relative precision.
  std::vector<double> tilde(2 * n + 1);
  double acc = 0.0;
  for (int i = -n; i <= 0; ++i) {
    tilde[i + n] = acc / span * prize;
    if (i < 0) acc += inc_at(i + 1);
  }
  tilde[n] = inc.down_total / span * prize;
  acc = 0.0;
  for (int i = n; i >= 1; --i) {
    tilde[i + n] = prize - acc / span * prize;
    acc += inc_at(i);
  }
  std::vector<double> decision(tilde);
  for (int i = -n + 1; i < n; ++i) {
    if (i != 0) decision[i + n] = (tilde[i + n] - p * tilde[n]) / (1.0 - p);
  }

  ValueSolution sol = from_coordinates(spec, decision, n, SolveMethod::kClosedTow);
  // Replace subtraction-based stakes with the exact increments.
  const auto& m = spec.automaton;
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) continue;
    const int i = *m.state(s).coord;
    StateValue& out = sol.states[s];
    out.stake_a = (inc_at(i) + inc_at(i + 1)) / span * prize;
    out.stake_b = (inc_at(-i) + inc_at(1 - i)) / span * prize;
    const BattleEquilibrium eq = stage_battle(sf, out.stake_a, out.stake_b);
    out.effort_a = eq.effort_a;
    out.effort_b = eq.effort_b;
    out.win_prob_a = eq.win_prob_a;
  }
  if (trace) {
    trace->margin = n;
    trace->delta_tilde.assign(2 * n + 1, 0.0);
    double up = 0.0, down = 0.0;
    for (int j = 1; j <= n; ++j) {
      up += inc.d[j - 1];
      down += inc.e[j - 1];
      trace->delta_tilde[n + j] = up;
      trace->delta_tilde[n - j] = -down;
    }
    trace->theta = inc.theta;
  }
  return sol;
}

// ---- consecutive-win ------------------------------------------------------

double cw_rho(const SuccessFunctionSpec& sf, int k) {
  require_homogeneous(sf, "cw_rho");
  if (k < 1) throw DomainError("cw_rho: K must be >= 1");
  if (k == 1) return 1.0;
  const auto iterate = [&](double r) {
    for (int t = 0; t < k - 1; ++t) {
      if (r < 1e-150) return 0.0;  // psi shrinks small arguments quadratically
      r = psi(sf, r);
    }
    return r;
  };
  const double hi = rootfind::expand_upper(iterate, 1.0, 2.0);
  const double rho = rootfind::solve_increasing(iterate, 1.0, 1.0, hi, 1e-14);
  const double miss = std::abs(iterate(rho) - 1.0);
  if (!(miss <= 1e-10)) throw ConvergenceError("cw_rho: bisection did not converge", miss, 400);
  return rho;
}

std::pair<double, double> cw_xi(const SuccessFunctionSpec& sf, int k, double prize, double u,
                                double w) {
  double a = 0.0;
  double b = prize;
  for (int j = 1; j < k; ++j) {
    const double ga = w - a;
    const double gb = b - u;
    const double na = a + ga * phi(sf, ga / gb);
    const double nb = u + gb * phi(sf, gb / ga);
    a = na;
    b = nb;
  }
  return {a, b};
}

ValueSolution solve_consecutive_closed(int k, const SuccessFunctionSpec& sf, double prize,
                                       CwTrace* trace) {
  require_homogeneous(sf, "solve_consecutive_closed");
  const ContestSpec spec(build_consecutive_win(k), sf, prize);
  CwTrace t;
  t.rho = cw_rho(sf, k);
  double r = t.rho;
  for (int s = 0; s + 2 <= k; ++s) {
    t.p_k *= 1.0 - phi(sf, 1.0 / r);
    r = psi(sf, r);
  }
  t.w = prize / (1.0 + t.rho - t.p_k);
  t.u = prize - t.rho * t.w;

  t.a.assign(k, 0.0);
  t.b.assign(k, prize);
  for (int j = 1; j < k; ++j) {
    const double ga = t.w - t.a[j - 1];
    const double gb = t.b[j - 1] - t.u;
    t.a[j] = t.a[j - 1] + ga * phi(sf, ga / gb);
    t.b[j] = t.u + gb * phi(sf, gb / ga);
  }
  t.xi_residual = std::hypot(t.a[k - 1] - t.u, t.b[k - 1] - t.w);

  std::vector<double> by_coord(2 * k + 1);
  for (int j = 0; j < k; ++j) {
    by_coord[j] = t.a[j];               // coordinate -K + j
    by_coord[2 * k - j] = t.b[j];       // coordinate K - j
  }
  by_coord[k] = t.u + phi(sf, 1.0) * (t.w - t.u);
  if (trace) *trace = t;
  return from_coordinates(spec, by_coord, k, SolveMethod::kClosedCw);
}

// ---- families -------------------------------------------------------------

Family parse_family(std::string_view name) {
  if (name == "best-of") return Family::kBestOf;
  if (name == "tug-of-war") return Family::kTugOfWar;
  if (name == "consecutive-win") return Family::kConsecutiveWin;
  if (name == "mk1") return Family::kMk1;
  throw ValidationError("unknown family '" + std::string(name) +
                        "' (expected best-of, tug-of-war, consecutive-win, mk1)");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::kBestOf:
      return "best-of";
    case Family::kTugOfWar:
      return "tug-of-war";
    case Family::kConsecutiveWin:
      return "consecutive-win";
    case Family::kMk1:
      return "mk1";
  }
  return "unknown";
}

ContestAutomaton build_family(const FamilyParams& fp) {
  switch (fp.family) {
    case Family::kBestOf:
      return build_best_of(fp.size);
    case Family::kTugOfWar:
      return build_tug_of_war(fp.size, fp.reset_p, fp.head_start);
    case Family::kConsecutiveWin:
      return build_consecutive_win(fp.size);
    case Family::kMk1:
      return build_mk1(fp.size);
  }
  throw ValidationError("unknown family");
}

ValueSolution solve_family(const FamilyParams& fp, const SuccessFunctionSpec& sf, double prize,
                           const CyclicOptions& opts) {
  if (sf.is_homogeneous()) {
    if (fp.family == Family::kTugOfWar) {
      return solve_tow_closed(fp.size, fp.reset_p, fp.head_start, sf, prize);
    }
    if (fp.family == Family::kConsecutiveWin) return solve_consecutive_closed(fp.size, sf, prize);
  }
  return solve(ContestSpec(build_family(fp), sf, prize), opts);
}

}  // namespace contest
