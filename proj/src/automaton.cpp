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

#include "contest/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "contest/error.hpp"

namespace contest {
namespace {

constexpr double kProbTol = 1e-12;

std::vector<StateId> reachable_from(const std::vector<std::array<Outcome, 2>>& outcomes,
                                    StateId root) {
  std::vector<char> seen(outcomes.size(), 0);
  std::vector<StateId> order{root};
  seen[root] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const auto& outcome : outcomes[order[head]]) {
      for (const auto& b : outcome) {
        if (!seen[b.to]) {
          seen[b.to] = 1;
          order.push_back(b.to);
        }
      }
    }
  }
  return order;
}

Outcome deterministic(StateId to) { return {Branch{to, 1.0}}; }

// Keeps the states reachable from `root`, renumbered in BFS order.
ContestAutomaton restrict_to(const ContestAutomaton& m, StateId root) {
  const auto order = reachable_from(m.outcomes(), root);
  std::vector<StateId> remap(m.size(), m.size());
  for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = i;
  std::vector<StateInfo> states;
  std::vector<std::array<Outcome, 2>> outcomes;
  for (StateId s : order) {
    states.push_back(m.state(s));
    std::array<Outcome, 2> out;
    for (Player w : {Player::kA, Player::kB}) {
      for (const auto& b : m.next(s, w)) out[index(w)].push_back({remap[b.to], b.prob});
    }
    outcomes.push_back(std::move(out));
  }
  return ContestAutomaton(std::move(states), 0, std::move(outcomes));
}

// Distribution over states, as sorted (state, prob) pairs.
using Dist = std::vector<std::pair<StateId, double>>;

Dist step(const ContestAutomaton& m, const Dist& d, Player w) {
  std::map<StateId, double> acc;
  for (const auto& [s, p] : d) {
    for (const auto& b : m.next(s, w)) acc[b.to] += p * b.prob;
  }
  return Dist(acc.begin(), acc.end());
}

bool same_dist(const Dist& a, const Dist& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || std::abs(a[i].second - b[i].second) > 1e-12) return false;
  }
  return true;
}

}  // namespace

char to_char(Player p) noexcept { return p == Player::kA ? 'A' : 'B'; }

std::string to_string(const History& h) {
  std::string out = "(";
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += ",";
    out += to_char(h[i]);
  }
  return out + ")";
}

ContestAutomaton::ContestAutomaton(std::vector<StateInfo> states, StateId start,
                                   std::vector<std::array<Outcome, 2>> outcomes)
    : states_(std::move(states)), start_(start), outcomes_(std::move(outcomes)) {
  if (states_.empty()) throw StructureError("automaton: no states");
  if (outcomes_.size() != states_.size()) {
    throw StructureError("automaton: outcome table does not match state count");
  }
  if (start_ >= states_.size()) throw StructureError("automaton: start id out of range");
  for (StateId s = 0; s < states_.size(); ++s) {
    const bool terminal = states_[s].terminal.has_value();
    for (Player w : {Player::kA, Player::kB}) {
      const Outcome& out = outcomes_[s][index(w)];
      if (terminal) {
        if (!out.empty()) {
          throw StructureError("automaton: terminal state " + std::to_string(s) +
                               " has outgoing transitions");
        }
        continue;
      }
      if (out.empty()) {
        throw StructureError("automaton: state " + std::to_string(s) + " lacks a " +
                             to_char(w) + "-win transition");
      }
      double total = 0.0;
      for (const auto& b : out) {
        if (b.to >= states_.size()) {
          throw StructureError("automaton: transition target out of range");
        }
        if (!(b.prob > 0.0)) throw StructureError("automaton: nonpositive branch probability");
        total += b.prob;
      }
      if (std::abs(total - 1.0) > kProbTol) {
        throw StructureError("automaton: branch probabilities at state " + std::to_string(s) +
                             " sum to " + std::to_string(total));
      }
      if (out.size() > 1) has_chance_ = true;
    }
  }
  if (reachable_from(outcomes_, start_).size() != states_.size()) {
    throw StructureError("automaton: some states are unreachable from start");
  }
}

std::size_t ContestAutomaton::nonterminal_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      states_.begin(), states_.end(), [](const StateInfo& s) { return !s.terminal; }));
}

ContestSpec::ContestSpec(ContestAutomaton m, SuccessFunctionSpec f, double v)
    : automaton(std::move(m)), sf(std::move(f)), prize(v) {
  if (!(prize > 0.0) || !std::isfinite(prize)) throw DomainError("prize must be positive");
}

// ---- builders -------------------------------------------------------------

ContestAutomaton build_best_of(int k) {
  if (k < 0) throw DomainError("best_of: K must be nonnegative");
  const int w = k + 1;
  std::map<std::pair<int, int>, StateId> ids;
  std::vector<std::pair<int, int>> cells;
  std::deque<std::pair<int, int>> queue{{0, 0}};
  ids[{0, 0}] = 0;
  cells.push_back({0, 0});
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (i == w || j == w) continue;
    for (const auto& next : {std::pair{i + 1, j}, std::pair{i, j + 1}}) {
      if (!ids.count(next)) {
        ids[next] = cells.size();
        cells.push_back(next);
        queue.push_back(next);
      }
    }
  }
  std::vector<StateInfo> states;
  std::vector<std::array<Outcome, 2>> outcomes;
  for (const auto& [i, j] : cells) {
    StateInfo info;
    info.label = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
    std::array<Outcome, 2> out;
    if (i == w) {
      info.terminal = Player::kA;
    } else if (j == w) {
      info.terminal = Player::kB;
    } else {
      out[0] = deterministic(ids.at({i + 1, j}));
      out[1] = deterministic(ids.at({i, j + 1}));
    }
    states.push_back(std::move(info));
    outcomes.push_back(std::move(out));
  }
  return ContestAutomaton(std::move(states), 0, std::move(outcomes));
}

ContestAutomaton build_tug_of_war(int margin, double reset_p, int head_start) {
  if (margin < 1) throw DomainError("tug_of_war: margin must be >= 1");
  if (!(reset_p >= 0.0 && reset_p < 1.0)) throw DomainError("tug_of_war: reset_p must lie in [0,1)");
  if (std::abs(head_start) >= margin) throw DomainError("tug_of_war: |head_start| must be < margin");
  const int n = margin;
  const auto id = [n](int lead) { return static_cast<StateId>(lead + n); };
  const auto land = [&](int lead) -> Outcome {
    if (std::abs(lead) == n || reset_p == 0.0 || lead == 0) return deterministic(id(lead));
    return {Branch{id(lead), 1.0 - reset_p}, Branch{id(0), reset_p}};
  };
  std::vector<StateInfo> states;
  std::vector<std::array<Outcome, 2>> outcomes;
  for (int lead = -n; lead <= n; ++lead) {
    StateInfo info{"lead " + std::to_string(lead), std::nullopt, lead};
    std::array<Outcome, 2> out;
    if (lead == n) {
      info.terminal = Player::kA;
    } else if (lead == -n) {
      info.terminal = Player::kB;
    } else {
      out[0] = land(lead + 1);
      out[1] = land(lead - 1);
    }
    states.push_back(std::move(info));
    outcomes.push_back(std::move(out));
  }
  return ContestAutomaton(std::move(states), id(head_start), std::move(outcomes));
}

ContestAutomaton build_consecutive_win(int k) {
  if (k < 1) throw DomainError("consecutive_win: K must be >= 1");
  const auto id = [k](int streak) { return static_cast<StateId>(streak + k); };
  std::vector<StateInfo> states;
  std::vector<std::array<Outcome, 2>> outcomes;
  for (int i = -k; i <= k; ++i) {
    StateInfo info{"streak " + std::to_string(i), std::nullopt, i};
    std::array<Outcome, 2> out;
    if (i == k) {
      info.terminal = Player::kA;
    } else if (i == -k) {
      info.terminal = Player::kB;
    } else {
      out[0] = deterministic(id(i >= 0 ? i + 1 : 1));
      out[1] = deterministic(id(i <= 0 ? i - 1 : -1));
    }
    states.push_back(std::move(info));
    outcomes.push_back(std::move(out));
  }
  return ContestAutomaton(std::move(states), id(0), std::move(outcomes));
}

ContestAutomaton build_mk1(int k) {
  if (k < 1) throw DomainError("mk1: K must be >= 1");
  const StateId incumbent_wins = static_cast<StateId>(k);
  const StateId challenger_wins = static_cast<StateId>(k + 1);
  std::vector<StateInfo> states;
  std::vector<std::array<Outcome, 2>> outcomes;
  for (int j = 0; j < k; ++j) {
    states.push_back({"challenger " + std::to_string(j), std::nullopt, j});
    outcomes.push_back({deterministic(incumbent_wins),
                        deterministic(j + 1 == k ? challenger_wins : StateId(j + 1))});
  }
  states.push_back({"incumbent wins", Player::kA, std::nullopt});
  outcomes.push_back({});
  states.push_back({"challenger wins", Player::kB, k});
  outcomes.push_back({});
  return ContestAutomaton(std::move(states), 0, std::move(outcomes));
}

ContestAutomaton build_extension(const ContestAutomaton& base, int n) {
  if (n < 2) throw DomainError("extension: N must be >= 2");
  if (base.has_chance()) throw StructureError("extension: base rule has chance layers");
  if (!find_mirror(base)) throw StructureError("extension: base rule is not symmetric");
  if (!check_exchangeable(base, default_exchange_depth(base)).exchangeable) {
    throw StructureError("extension: base rule is not exchangeable");
  }
  // Layout: 0 start, 1..n-1 A streaks, n..2n-2 B streaks, 2n-1 A wins,
  // 2n B wins, then the base copy.
  const StateId a_wins = 2 * n - 1;
  const StateId b_wins = 2 * n;
  const StateId offset = 2 * n + 1;
  const auto a_streak = [](int j) { return static_cast<StateId>(j); };
  const auto b_streak = [n](int j) { return static_cast<StateId>(n - 1 + j); };

  std::vector<StateInfo> states(offset);
  std::vector<std::array<Outcome, 2>> outcomes(offset);
  states[0] = {"(0,0)", std::nullopt, std::nullopt};
  outcomes[0] = {deterministic(a_streak(1)), deterministic(b_streak(1))};
  for (int j = 1; j < n; ++j) {
    const History a_run(j - 1, Player::kA);
    const History b_run(j - 1, Player::kB);
    states[a_streak(j)] = {"(" + std::to_string(j) + ",0)", std::nullopt, std::nullopt};
    outcomes[a_streak(j)] = {deterministic(j + 1 == n ? a_wins : a_streak(j + 1)),
                             deterministic(offset + walk(base, base.start(), a_run))};
    states[b_streak(j)] = {"(0," + std::to_string(j) + ")", std::nullopt, std::nullopt};
    outcomes[b_streak(j)] = {deterministic(offset + walk(base, base.start(), b_run)),
                             deterministic(j + 1 == n ? b_wins : b_streak(j + 1))};
  }
  states[a_wins] = {"A wins", Player::kA, std::nullopt};
  states[b_wins] = {"B wins", Player::kB, std::nullopt};
  for (StateId s = 0; s < base.size(); ++s) {
    StateInfo info = base.state(s);
    info.label = "base " + info.label;
    states.push_back(std::move(info));
    std::array<Outcome, 2> out;
    for (Player w : {Player::kA, Player::kB}) {
      for (const auto& b : base.next(s, w)) out[index(w)].push_back({offset + b.to, b.prob});
    }
    outcomes.push_back(std::move(out));
  }
  // The raw table can contain base states only reachable from base.start()
  // through paths the extension never takes; drop them before validation.
  const auto keep = reachable_from(outcomes, 0);
  std::vector<StateId> remap(states.size(), states.size());
  for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = i;
  std::vector<StateInfo> kept_states;
  std::vector<std::array<Outcome, 2>> kept_outcomes;
  for (StateId s : keep) {
    kept_states.push_back(states[s]);
    std::array<Outcome, 2> out;
    for (std::size_t w = 0; w < 2; ++w) {
      for (const auto& b : outcomes[s][w]) out[w].push_back({remap[b.to], b.prob});
    }
    kept_outcomes.push_back(std::move(out));
  }
  return ContestAutomaton(std::move(kept_states), 0, std::move(kept_outcomes));
}

// ---- structure ------------------------------------------------------------

std::optional<int> min_length(const ContestAutomaton& m) {
  std::vector<int> dist(m.size(), -1);
  std::deque<StateId> queue{m.start()};
  dist[m.start()] = 0;
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    if (m.is_terminal(s)) return dist[s];
    for (Player w : {Player::kA, Player::kB}) {
      for (const auto& b : m.next(s, w)) {
        if (dist[b.to] < 0) {
          dist[b.to] = dist[s] + 1;
          queue.push_back(b.to);
        }
      }
    }
  }
  return std::nullopt;
}

bool is_nontrivial(const ContestAutomaton& m) { return min_length(m).has_value(); }

std::vector<StateId> topological_order(const ContestAutomaton& m) {
  std::vector<int> indegree(m.size(), 0);
  for (StateId s = 0; s < m.size(); ++s) {
    for (const auto& out : m.outcomes()[s]) {
      for (const auto& b : out) ++indegree[b.to];
    }
  }
  std::vector<StateId> order;
  for (StateId s = 0; s < m.size(); ++s) {
    if (indegree[s] == 0) order.push_back(s);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const auto& out : m.outcomes()[order[head]]) {
      for (const auto& b : out) {
        if (--indegree[b.to] == 0) order.push_back(b.to);
      }
    }
  }
  if (order.size() != m.size()) throw CycleError("automaton has a cycle");
  return order;
}

bool is_acyclic(const ContestAutomaton& m) {
  try {
    topological_order(m);
    return true;
  } catch (const CycleError&) {
    return false;
  }
}

int eccentricity(const ContestAutomaton& m) {
  std::vector<int> dist(m.size(), -1);
  std::deque<StateId> queue{m.start()};
  dist[m.start()] = 0;
  int far = 0;
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    far = std::max(far, dist[s]);
    for (const auto& out : m.outcomes()[s]) {
      for (const auto& b : out) {
        if (dist[b.to] < 0) {
          dist[b.to] = dist[s] + 1;
          queue.push_back(b.to);
        }
      }
    }
  }
  return far;
}

int default_exchange_depth(const ContestAutomaton& m) {
  return std::clamp(2 * eccentricity(m), 2, 12);
}

StateId walk(const ContestAutomaton& m, StateId from, const History& h) {
  StateId s = from;
  for (Player w : h) {
    if (m.is_terminal(s)) break;
    const Outcome& out = m.next(s, w);
    if (out.size() != 1) throw StructureError("walk: chance layer on a deterministic walk");
    s = out.front().to;
  }
  return s;
}

ExchangeabilityResult check_exchangeable(const ContestAutomaton& raw, int depth) {
  if (depth < 2) throw DomainError("check_exchangeable: depth must be >= 2");
  const ContestAutomaton m = minimize(raw);
  ExchangeabilityResult result;
  result.depth = depth;
  for (int len = depth; len >= 2 && result.exchangeable; --len) {
    // First history seen for each count of A wins, with its distribution.
    std::map<int, std::pair<History, Dist>> canon;
    History h;
    std::function<void(const Dist&, int)> visit = [&](const Dist& d, int a_wins) {
      if (!result.exchangeable) return;
      if (static_cast<int>(h.size()) == len) {
        auto [it, fresh] = canon.try_emplace(a_wins, h, d);
        if (!fresh && !same_dist(it->second.second, d)) {
          result.exchangeable = false;
          result.witness = std::make_pair(it->second.first, h);
        }
        return;
      }
      for (const auto& [s, p] : d) {
        if (m.is_terminal(s)) return;  // ended before the last battle
      }
      for (Player w : {Player::kA, Player::kB}) {
        h.push_back(w);
        visit(step(m, d, w), a_wins + (w == Player::kA));
        h.pop_back();
      }
    };
    visit(Dist{{m.start(), 1.0}}, 0);
  }
  return result;
}

std::optional<std::vector<StateId>> find_mirror(const ContestAutomaton& m) {
  constexpr StateId kUnset = static_cast<StateId>(-1);
  std::vector<StateId> sigma(m.size(), kUnset);
  sigma[m.start()] = m.start();
  std::deque<StateId> queue{m.start()};
  const auto bind = [&](StateId s, StateId t) {
    if (sigma[s] == kUnset) {
      sigma[s] = t;
      queue.push_back(s);
      return true;
    }
    return sigma[s] == t;
  };
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    const StateId t = sigma[s];
    const auto ws = m.winner(s);
    const auto wt = m.winner(t);
    if (ws.has_value() != wt.has_value()) return std::nullopt;
    if (ws) {
      if (*wt != other(*ws)) return std::nullopt;
      continue;
    }
    for (Player w : {Player::kA, Player::kB}) {
      const Outcome& a = m.next(s, w);
      const Outcome& b = m.next(t, other(w));
      if (a.size() != b.size()) return std::nullopt;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].prob - b[i].prob) > kProbTol) return std::nullopt;
        if (!bind(a[i].to, b[i].to)) return std::nullopt;
      }
    }
  }
  for (StateId s = 0; s < m.size(); ++s) {
    if (sigma[s] == kUnset || sigma[sigma[s]] != s) return std::nullopt;
  }
  return sigma;
}

ContestAutomaton minimize(const ContestAutomaton& m) {
  // Partition refinement; probabilities are compared on a 1e-12 grid.
  std::vector<std::size_t> block(m.size());
  for (StateId s = 0; s < m.size(); ++s) {
    const auto w = m.winner(s);
    block[s] = w ? (*w == Player::kA ? 0 : 1) : 2;
  }
  using Signature = std::vector<long long>;
  std::size_t blocks = 0;
  for (;;) {
    std::map<Signature, std::size_t> index_of;
    std::vector<std::size_t> next(m.size());
    for (StateId s = 0; s < m.size(); ++s) {
      Signature sig{static_cast<long long>(block[s])};
      if (!m.is_terminal(s)) {
        for (Player w : {Player::kA, Player::kB}) {
          std::map<std::size_t, double> mass;
          for (const auto& b : m.next(s, w)) mass[block[b.to]] += b.prob;
          sig.push_back(-1);
          for (const auto& [blk, p] : mass) {
            sig.push_back(static_cast<long long>(blk));
            sig.push_back(std::llround(p * 1e12));
          }
        }
      }
      next[s] = index_of.try_emplace(std::move(sig), index_of.size()).first->second;
    }
    block = std::move(next);
    if (index_of.size() == blocks) break;
    blocks = index_of.size();
  }
  // Renumber blocks so the start block comes first, then build the quotient.
  std::vector<StateId> rep(blocks, m.size());
  for (StateId s = 0; s < m.size(); ++s) {
    if (rep[block[s]] == m.size()) rep[block[s]] = s;
  }
  std::vector<StateInfo> states;
  std::vector<std::array<Outcome, 2>> outcomes;
  for (std::size_t b = 0; b < blocks; ++b) {
    const StateId s = rep[b];
    StateInfo info = m.state(s);
    if (info.terminal) info.label = std::string(1, to_char(*info.terminal)) + " wins";
    states.push_back(std::move(info));
    std::array<Outcome, 2> out;
    if (!m.is_terminal(s)) {
      for (Player w : {Player::kA, Player::kB}) {
        std::map<std::size_t, double> mass;
        for (const auto& br : m.next(s, w)) mass[block[br.to]] += br.prob;
        for (const auto& [blk, p] : mass) out[index(w)].push_back({blk, p});
      }
    }
    outcomes.push_back(std::move(out));
  }
  // Every block is reachable because every state of m is.
  ContestAutomaton quotient(std::move(states), block[m.start()], std::move(outcomes));
  return restrict_to(quotient, quotient.start());
}

bool isomorphic(const ContestAutomaton& a, const ContestAutomaton& b) {
  if (a.size() != b.size()) return false;
  constexpr StateId kUnset = static_cast<StateId>(-1);
  std::vector<StateId> fwd(a.size(), kUnset), bwd(b.size(), kUnset);
  std::deque<StateId> queue{a.start()};
  fwd[a.start()] = b.start();
  bwd[b.start()] = a.start();
  const auto bind = [&](StateId s, StateId t) {
    if (fwd[s] == kUnset && bwd[t] == kUnset) {
      fwd[s] = t;
      bwd[t] = s;
      queue.push_back(s);
      return true;
    }
    return fwd[s] == t && bwd[t] == s;
  };
  const auto sorted = [](Outcome o) {
    std::stable_sort(o.begin(), o.end(),
                     [](const Branch& x, const Branch& y) { return x.prob < y.prob; });
    return o;
  };
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    const StateId t = fwd[s];
    if (a.winner(s) != b.winner(t)) return false;
    if (a.is_terminal(s)) continue;
    for (Player w : {Player::kA, Player::kB}) {
      const Outcome x = sorted(a.next(s, w));
      const Outcome y = sorted(b.next(t, w));
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i].prob - y[i].prob) > kProbTol) return false;
        if (!bind(x[i].to, y[i].to)) return false;
      }
    }
  }
  return true;
}

ContestAutomaton rooted_at(const ContestAutomaton& m, StateId root) {
  if (root >= m.size()) throw DomainError("rooted_at: state id out of range");
  return restrict_to(m, root);
}

}  // namespace contest
