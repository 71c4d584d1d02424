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

#include <algorithm>
#include <set>

#include "contest/automaton.hpp"
#include "contest/error.hpp"
#include "doctest.h"

using namespace contest;

namespace {

constexpr Player A = Player::kA;
constexpr Player B = Player::kB;

History h(const char* s) {
  History out;
  for (; *s; ++s) out.push_back(*s == 'A' ? A : B);
  return out;
}

// Terminal winner after a deterministic history, or nullopt if play goes on.
std::optional<Player> ends(const ContestAutomaton& m, const char* hist) {
  return m.winner(walk(m, m.start(), h(hist)));
}

bool ends_exactly(const ContestAutomaton& m, const char* hist, Player w) {
  const History full = h(hist);
  StateId s = m.start();
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (m.is_terminal(s)) return false;  // ended early
    s = m.next(s, full[i]).front().to;
  }
  return m.winner(s) == w;
}

}  // namespace

TEST_CASE("best-of-3 structure") {
  const auto m = build_best_of(1);
  CHECK(m.nonterminal_count() == 4);
  CHECK(m.size() == 8);
  CHECK(is_acyclic(m));
  CHECK(ends_exactly(m, "AA", A));
  CHECK(ends_exactly(m, "BAA", A));
  CHECK(ends_exactly(m, "ABAA", A) == false);
  CHECK(ends_exactly(m, "ABB", B));
  CHECK(ends_exactly(m, "BB", B));
  CHECK(ends_exactly(m, "ABA", A));
  CHECK(min_length(m) == 2);
}

TEST_CASE("best-of family sizes") {
  CHECK(build_best_of(0).nonterminal_count() == 1);
  for (int k = 0; k <= 6; ++k) {
    const auto m = build_best_of(k);
    CHECK(min_length(m) == k + 1);
    CHECK(m.nonterminal_count() == static_cast<std::size_t>((k + 1) * (k + 1)));
  }
}

TEST_CASE("tug-of-war margin 2") {
  const auto m = build_tug_of_war(2);
  CHECK(ends_exactly(m, "AA", A));
  CHECK(ends_exactly(m, "BB", B));
  CHECK(ends_exactly(m, "ABBB", B));
  CHECK(ends_exactly(m, "BAAA", A));
  CHECK_FALSE(ends(m, "ABAB").has_value());
  CHECK_FALSE(is_acyclic(m));
  CHECK(build_tug_of_war(1).nonterminal_count() == 1);
  for (int n = 1; n <= 8; ++n) CHECK(min_length(build_tug_of_war(n)) == n);
  CHECK_THROWS_AS(build_tug_of_war(3, 0.0, 3), DomainError);
  CHECK_THROWS_AS(build_tug_of_war(3, 1.0), DomainError);
}

TEST_CASE("tug-of-war reset layer") {
  const auto m = build_tug_of_war(3, 0.5);
  CHECK(m.has_chance());
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) continue;
    for (Player w : {A, B}) {
      double total = 0.0;
      for (const Branch& b : m.next(s, w)) total += b.prob;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
      const Outcome& out = m.next(s, w);
      const StateId to = out.front().to;
      if (!m.is_terminal(to) && *m.state(to).coord != 0) {
        REQUIRE(out.size() == 2);
        CHECK(out[1].prob == 0.5);
        CHECK(*m.state(out[1].to).coord == 0);
      }
    }
  }
}

TEST_CASE("consecutive-win structure") {
  const auto m = build_consecutive_win(2);
  CHECK(m.size() == 5);
  std::set<int> coords;
  for (StateId s = 0; s < m.size(); ++s) coords.insert(*m.state(s).coord);
  CHECK(coords == std::set<int>{-2, -1, 0, 1, 2});
  const auto m3 = build_consecutive_win(3);
  CHECK(walk(m3, m3.start(), h("AAB")) != walk(m3, m3.start(), h("ABA")));
  CHECK(build_consecutive_win(1).nonterminal_count() == 1);
  for (int k = 1; k <= 8; ++k) CHECK(min_length(build_consecutive_win(k)) == k);
}

TEST_CASE("M(K,1) structure") {
  const auto m = build_mk1(2);
  CHECK(m.nonterminal_count() == 2);
  CHECK(ends_exactly(m, "A", A));
  CHECK(ends_exactly(m, "BA", A));
  CHECK(ends_exactly(m, "BB", B));
  CHECK(is_acyclic(m));
  CHECK(min_length(build_mk1(3)) == 1);
  CHECK(build_mk1(1).nonterminal_count() == 1);
}

TEST_CASE("exchangeability certificates") {
  CHECK(check_exchangeable(build_best_of(2), 6).exchangeable);
  CHECK(check_exchangeable(build_best_of(2), default_exchange_depth(build_best_of(2))).exchangeable);
  CHECK(check_exchangeable(build_tug_of_war(3), 6).exchangeable);
  const auto r = check_exchangeable(build_consecutive_win(3), 3);
  CHECK_FALSE(r.exchangeable);
  REQUIRE(r.witness.has_value());
  CHECK(to_string(r.witness->first) == "(A,A,B)");
  CHECK(to_string(r.witness->second) == "(A,B,A)");
  CHECK_FALSE(check_exchangeable(build_mk1(3), 4).exchangeable == false);
}

TEST_CASE("default depth is twice the eccentricity, clamped to [2, 12]") {
  CHECK(default_exchange_depth(build_best_of(0)) == 2);
  CHECK(default_exchange_depth(build_tug_of_war(30)) == 12);
}

TEST_CASE("mirror involution exists for symmetric builders") {
  for (const auto& m : {build_best_of(2), build_tug_of_war(4, 0.3), build_consecutive_win(4)}) {
    const auto mirror = find_mirror(m);
    REQUIRE(mirror.has_value());
    for (StateId s = 0; s < m.size(); ++s) CHECK((*mirror)[(*mirror)[s]] == s);
  }
  CHECK_FALSE(find_mirror(build_mk1(2)).has_value());
  CHECK_FALSE(find_mirror(build_tug_of_war(3, 0.0, 1)).has_value());
}

TEST_CASE("extension of a single battle reproduces best-of") {
  ContestAutomaton m = build_best_of(0);
  for (int k = 1; k <= 4; ++k) {
    m = build_extension(m, k + 1);
    CHECK(isomorphic(minimize(m), minimize(build_best_of(k))));
  }
  CHECK(isomorphic(minimize(build_extension(build_best_of(0), 2)), minimize(build_best_of(1))));
}

TEST_CASE("tug-of-war is its own extension") {
  for (int n = 2; n <= 5; ++n) {
    const auto t = build_tug_of_war(n);
    const auto e = build_extension(t, n);
    CHECK(isomorphic(minimize(e), minimize(t)));
    // Play after (A,B) is the base contest.
    const StateId after = walk(e, e.start(), h("AB"));
    CHECK(isomorphic(minimize(rooted_at(e, after)), minimize(t)));
  }
}

TEST_CASE("extension rejects non-exchangeable bases") {
  CHECK_THROWS_AS(build_extension(build_consecutive_win(3), 2), StructureError);
  CHECK_THROWS_AS(build_extension(build_best_of(1), 1), DomainError);
}

TEST_CASE("constructor validation") {
  std::vector<StateInfo> st(2);
  st[1].terminal = A;
  std::vector<std::array<Outcome, 2>> out(2);
  out[0][0] = {Branch{1, 1.0}};
  out[0][1] = {Branch{1, 0.5}};  // probabilities do not sum to one
  CHECK_THROWS_AS(ContestAutomaton(st, 0, out), StructureError);
  out[0][1] = {Branch{0, 1.0}};
  const ContestAutomaton ok(st, 0, out);
  CHECK(min_length(ok) == 1);
  CHECK(is_nontrivial(ok));
  // No terminal reachable.
  std::vector<StateInfo> loop(1);
  std::vector<std::array<Outcome, 2>> lo(1);
  lo[0][0] = {Branch{0, 1.0}};
  lo[0][1] = {Branch{0, 1.0}};
  const ContestAutomaton trivial(loop, 0, lo);
  CHECK_FALSE(min_length(trivial).has_value());
  CHECK_FALSE(is_nontrivial(trivial));
}

TEST_CASE("topological order on acyclic rules, cycle error otherwise") {
  const auto m = build_best_of(2);
  const auto order = topological_order(m);
  CHECK(order.size() == m.size());
  CHECK_THROWS_AS(topological_order(build_tug_of_war(3)), CycleError);
}
