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

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "contest/error.hpp"
#include "contest/incumbency.hpp"
#include "doctest.h"

using namespace contest;
using Rational = boost::multiprecision::cpp_rational;

namespace {

const auto kT1 = SuccessFunctionSpec::tullock(1.0);

struct ExactSub {
  Rational v_plus, v_minus, upset;
};

// MK1 under Tullock r=1, exactly: the challenger has j wins; the incumbent
// ends it with one win. Battle payoffs D^3 / (D + D')^2, p = D / (D + D').
ExactSub exact_mk1(int k) {
  Rational inc = 0, chal = 1, up = 1;  // at j = K: challenger has won
  for (int j = k - 1; j >= 0; --j) {
    const Rational da = 1 - inc;  // incumbent stake: win now vs continue
    const Rational db = chal;
    const Rational s = da + db;
    const Rational na = inc + da * da * da / (s * s);
    const Rational nb = db * db * db / (s * s);
    up *= db / s;
    inc = na;
    chal = nb;
  }
  return {inc, chal, up};
}

double to_d(const Rational& x) { return static_cast<double>(x); }

}  // namespace

TEST_CASE("MK1 subcontest values against exact rationals") {
  for (int k = 1; k <= 5; ++k) {
    const auto ex = exact_mk1(k);
    const auto s = sub_values({SubKind::kMk1, k}, kT1, 1.0);
    CHECK(s.v_plus == doctest::Approx(to_d(ex.v_plus)).epsilon(1e-12));
    CHECK(s.v_minus == doctest::Approx(to_d(ex.v_minus)).epsilon(1e-12));
    CHECK(s.upset == doctest::Approx(to_d(ex.upset)).epsilon(1e-12));
    CHECK(s.log10_bias == doctest::Approx(std::log10(to_d((1 - ex.v_plus) / ex.v_minus))).epsilon(1e-10));
  }
  const auto one = sub_values({SubKind::kMk1, 1}, kT1, 1.0);
  CHECK(one.v_plus == doctest::Approx(0.25));
  CHECK(one.upset == doctest::Approx(0.5));
  CHECK(bias_ratio({SubKind::kMk1, 1}, kT1) == doctest::Approx(3.0));
}

TEST_CASE("head-start subcontest against the tug-of-war closed form") {
  for (int k = 1; k <= 4; ++k) {
    const auto s = sub_values({SubKind::kTowHeadStart, k}, kT1, 2.0);
    const auto sol = solve_tow_closed(k + 1, 0.0, k, kT1, 2.0);
    CHECK(s.v_plus == doctest::Approx(sol.v0_a()).epsilon(1e-10));
    CHECK(s.v_minus == doctest::Approx(sol.v0_b()).epsilon(1e-9));
    // 2 - V+ cancels in double beyond K = 3.
    if (k <= 3) CHECK(s.log10_bias ==
          doctest::Approx(std::log10((2.0 - sol.v0_a()) / sol.v0_b())).epsilon(1e-8));
  }
}

TEST_CASE("subcontest values scale with the prize for homogeneous battles") {
  const SubContest sub{SubKind::kMk1, 3};
  const auto a = sub_values(sub, SuccessFunctionSpec::serial(0.5), 1.0);
  const auto b = sub_values(sub, SuccessFunctionSpec::serial(0.5), 5.0);
  CHECK(b.v_plus == doctest::Approx(5 * a.v_plus));
  CHECK(b.v_minus == doctest::Approx(5 * a.v_minus));
  CHECK(b.upset == doctest::Approx(a.upset));
}

TEST_CASE("bias ratio grows with the subcontest size") {
  for (const auto kind : {SubKind::kMk1, SubKind::kTowHeadStart}) {
    double prev = -1;
    for (int k = 1; k <= 10; ++k) {
      const double lb = log10_bias_ratio({kind, k}, kT1);
      CHECK(std::isfinite(lb));
      CHECK(lb > prev);
      prev = lb;
    }
  }
  // Deep subcontests overflow the plain ratio but not its logarithm.
  CHECK(std::isinf(bias_ratio({SubKind::kTowHeadStart, 10}, kT1)));
}

TEST_CASE("round recursion against a direct oracle") {
  IncumbencySpec spec;
  spec.rounds = 6;
  spec.shock_q = 0.4;
  spec.sub = {SubKind::kMk1, 2};
  spec.prize = 3.0;
  const auto rep = solve_incumbency(spec);
  const auto unit = sub_values(spec.sub, spec.sf, 1.0);
  // Round n stakes v_n = W+(n+1) - W-(n+1); a shock reopens the subcontest.
  double wp = 3.0, wm = 0.0;
  for (int n = spec.rounds; n >= 1; --n) {
    const double vn = wp - wm;
    const double np = wm + (1 - spec.shock_q) * vn + spec.shock_q * unit.v_plus * vn;
    const double nm = wm + spec.shock_q * unit.v_minus * vn;
    const auto& r = rep.rounds[n - 1];
    CHECK(r.round == n);
    CHECK(r.v_n == doctest::Approx(vn).epsilon(1e-13));
    CHECK(r.w_plus == doctest::Approx(np).epsilon(1e-13));
    CHECK(r.w_minus == doctest::Approx(nm).epsilon(1e-13));
    wp = np;
    wm = nm;
  }
  CHECK(rep.start_value == doctest::Approx(0.5 * (wp + wm)));
  CHECK(rep.dissipation.total_effort == doctest::Approx(3.0 - wp - wm));
  CHECK_FALSE(rep.dissipation.min_length.has_value());
  CHECK(rep.dissipation.thm1_bound == 1.0);
  CHECK(rep.trajectory.size() == 12);
  CHECK(rep.trajectory_gap(2) == doctest::Approx(std::sqrt(2.0) * (rep.rounds[1].w_plus - rep.rounds[1].w_minus)));
}

TEST_CASE("every round a shock fixes the battle count") {
  IncumbencySpec spec;
  spec.rounds = 4;
  spec.shock_q = 1.0;
  spec.sub = {SubKind::kTowHeadStart, 2};
  const auto rep = solve_incumbency(spec);
  CHECK(rep.dissipation.min_length == 4 * 1);
  CHECK(rep.dissipation.bound_satisfied);
  spec.sub = {SubKind::kMk1, 3};
  CHECK(solve_incumbency(spec).dissipation.min_length == 4);
}

TEST_CASE("rounds for reach is the smallest admissible count") {
  for (double u : {0.005, 0.1, 0.5}) {
    for (double q : {0.3, 1.0}) {
      for (double eps : {0.01, 0.2}) {
        int n = 1;
        while (std::pow(1 - q * u, n - 1) > eps) ++n;
        CHECK(rounds_for_reach(u, q, eps) == n);
      }
    }
  }
  CHECK(rounds_for_reach(1.0, 1.0, 0.01) == 2);
  CHECK_THROWS_AS(rounds_for_reach(0.0, 0.5, 0.01), DomainError);
}

TEST_CASE("biased incumbency dissipates nearly the whole prize") {
  IncumbencySpec spec;
  spec.shock_q = 0.5;
  spec.sub = {SubKind::kMk1, 3};
  const auto unit = sub_values(spec.sub, spec.sf, 1.0);
  spec.rounds = rounds_for_reach(unit.upset, spec.shock_q, 0.01);
  const auto rep = solve_incumbency(spec);
  CHECK(rep.bias_ratio >= 100);
  const auto td = incumbency_transient_dominance(rep, spec, 0.01);
  CHECK(td.satisfied);
  CHECK(td.reach_both_prob >= 0.99);
  CHECK(rep.dissipation.dissipation_ratio >= td.implied_effort_floor);
  CHECK(td.floor_holds);
  for (int n = 2; n <= spec.rounds; ++n) {
    CHECK(rep.trajectory_gap(n) > rep.trajectory_gap(n - 1));
  }
  // Too few rounds: the lead rarely changes hands in time.
  spec.rounds = 3;
  const auto few = solve_incumbency(spec);
  CHECK_FALSE(incumbency_transient_dominance(few, spec, 0.01).satisfied);
}

TEST_CASE("incumbency inputs are validated") {
  IncumbencySpec spec;
  spec.rounds = 0;
  CHECK_THROWS_AS(solve_incumbency(spec), DomainError);
  spec.rounds = 2;
  spec.shock_q = 0.0;
  CHECK_THROWS_AS(solve_incumbency(spec), DomainError);
  spec.shock_q = 1.5;
  CHECK_THROWS_AS(solve_incumbency(spec), DomainError);
  spec.shock_q = 1.0;
  spec.sub.k = 0;
  CHECK_THROWS_AS(solve_incumbency(spec), DomainError);
  spec.sub.k = 2;
  const auto rep = solve_incumbency(spec);
  CHECK_THROWS_AS(incumbency_transient_dominance(rep, spec, 0.3), DomainError);
  CHECK(parse_sub_kind(to_string(SubKind::kTowHeadStart)) == SubKind::kTowHeadStart);
  CHECK_THROWS_AS(parse_sub_kind("mk2"), ValidationError);
}
