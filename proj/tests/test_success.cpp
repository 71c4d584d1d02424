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

#include <cmath>
#include <vector>

#include "contest/error.hpp"
#include "contest/success.hpp"
#include "doctest.h"

using namespace contest;

namespace {

const auto kTullock1 = SuccessFunctionSpec::tullock(1.0);

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return g;
}

std::vector<SuccessFunctionSpec> homogeneous_specs() {
  return {SuccessFunctionSpec::tullock(1.0), SuccessFunctionSpec::tullock(0.5),
          SuccessFunctionSpec::tullock(0.2), SuccessFunctionSpec::serial(0.5),
          SuccessFunctionSpec::serial(0.8), SuccessFunctionSpec::noisy(kTullock1, 0.7),
          SuccessFunctionSpec::noisy(SuccessFunctionSpec::serial(0.3), 0.4)};
}

// Oracle: Tullock r=1 written out by hand.
double tullock_gamma(double t) { return t / (1.0 + t); }
double tullock_phi(double t) { return t * t / ((1.0 + t) * (1.0 + t)); }

}  // namespace

TEST_CASE("gamma examples for Tullock r=1") {
  CHECK(eval_gamma(kTullock1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_gamma(kTullock1, 3.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(eval_gamma(kTullock1, 0.0) == 0.0);
  CHECK(eval_gamma(kTullock1, INFINITY) == 1.0);
  for (double t : log_grid(1e-3, 1e3, 41)) {
    CHECK(eval_gamma(kTullock1, t) == doctest::Approx(tullock_gamma(t)).epsilon(1e-14));
  }
}

TEST_CASE("phi examples and finite-difference cross-check") {
  CHECK(phi(kTullock1, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(phi(kTullock1, 3.0) == doctest::Approx(0.5625).epsilon(1e-15));
  for (const auto& sf : homogeneous_specs()) {
    const double floor = sf.kind() == SfKind::kNoisy ? (1 - sf.noise_q()) / 2 : 0.0;
    CHECK(phi(sf, 0.0) == doctest::Approx(floor));
  }
  for (double t : log_grid(1e-2, 1e2, 25)) {
    CHECK(phi(kTullock1, t) == doctest::Approx(tullock_phi(t)).epsilon(1e-13));
  }
  // phi = gamma - theta gamma' with gamma' by central differences.
  for (const auto& sf : homogeneous_specs()) {
    for (double t : {0.3, 0.7, 1.5, 4.0, 20.0}) {
      const double h = 1e-6 * t;
      const double slope = (eval_gamma(sf, t + h) - eval_gamma(sf, t - h)) / (2 * h);
      CHECK(phi(sf, t) == doctest::Approx(eval_gamma(sf, t) - t * slope).epsilon(1e-7));
    }
  }
}

TEST_CASE("non-homogeneous kinds are rejected by the homogeneous operations") {
  const auto ratio = SuccessFunctionSpec::ratio_power(0.8);
  CHECK_THROWS_AS(eval_gamma(ratio, 1.0), UnsupportedKindError);
  CHECK_THROWS_AS(phi(ratio, 1.0), UnsupportedKindError);
  CHECK_THROWS_AS(psi(ratio, 1.0), UnsupportedKindError);
}

TEST_CASE("homogeneous symmetry and monotonicity on a log grid") {
  for (const auto& sf : homogeneous_specs()) {
    CAPTURE(sf.to_string());
    double prev_phi = -1.0;
    double prev_gamma = -1.0;
    for (double t : log_grid(1e-6, 1e6, 241)) {
      CHECK(std::abs(eval_gamma(sf, t) + eval_gamma(sf, 1.0 / t) - 1.0) <= 1e-12);
      const double p = phi(sf, t);
      CHECK(p > prev_phi);
      CHECK(eval_gamma(sf, t) > prev_gamma);
      prev_phi = p;
      prev_gamma = eval_gamma(sf, t);
    }
    CHECK(phi(sf, 1.0) > 0.0);
    CHECK(phi(sf, 1.0) < 0.5);
    const double top = sf.kind() == SfKind::kNoisy ? (1 + sf.noise_q()) / 2 : 1.0;
    CHECK(phi(sf, 1e15) <= top);
    CHECK(phi(sf, 1e15) > top - 1e-2);
  }
}

TEST_CASE("serial SF is continuous at theta = 1") {
  const auto sf = SuccessFunctionSpec::serial(0.5);
  CHECK(eval_gamma(sf, 1.0 - 1e-12) == doctest::Approx(eval_gamma(sf, 1.0 + 1e-12)));
  CHECK(phi(sf, 1.0 - 1e-12) == doctest::Approx(phi(sf, 1.0 + 1e-12)));
  CHECK(phi(sf, 1.0) == doctest::Approx(0.25));  // (1 - alpha)/2
}

TEST_CASE("solve_battle examples") {
  const auto sym = solve_battle(kTullock1, 1.0, 1.0);
  CHECK(std::abs(sym.effort_a - 0.25) <= 1e-13);
  CHECK(std::abs(sym.effort_b - 0.25) <= 1e-13);
  CHECK(std::abs(sym.payoff_a - 0.25) <= 1e-13);
  CHECK(std::abs(sym.payoff_b - 0.25) <= 1e-13);
  CHECK(sym.win_prob_a == doctest::Approx(0.5));

  const auto lop = solve_battle(kTullock1, 3.0, 1.0);
  CHECK(lop.win_prob_a == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(lop.payoff_a == doctest::Approx(27.0 / 16.0).epsilon(1e-14));
  CHECK(lop.payoff_b == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  // Asymmetric Tullock efforts: x_A = D_A^2 D_B / (D_A + D_B)^2.
  CHECK(lop.effort_a == doctest::Approx(9.0 / 16.0).epsilon(1e-14));
  CHECK(lop.effort_b == doctest::Approx(3.0 / 16.0).epsilon(1e-14));

  CHECK_THROWS_AS(solve_battle(kTullock1, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(solve_battle(kTullock1, 1.0, -1.0), DomainError);
}

TEST_CASE("battle invariants hold for every kind") {
  std::vector<SuccessFunctionSpec> specs = homogeneous_specs();
  specs.push_back(SuccessFunctionSpec::ratio_power(0.8));
  specs.push_back(SuccessFunctionSpec::ratio_shifted(0.5, 1.0));
  for (const auto& sf : specs) {
    for (double da : {0.1, 1.0, 7.0}) {
      for (double db : {0.2, 1.0, 3.0}) {
        const auto eq = solve_battle(sf, da, db);
        CAPTURE(sf.to_string());
        CHECK(eq.win_prob_a + eq.win_prob_b() == doctest::Approx(1.0));
        CHECK(eq.payoff_a >= 0.0);
        CHECK(eq.payoff_b >= 0.0);
        CHECK(eq.payoff_a == doctest::Approx(eq.win_prob_a * da - eq.effort_a).epsilon(1e-10));
        CHECK(eq.gain_ratio_a == doctest::Approx(eq.payoff_a / da).epsilon(1e-12));
        if (sf.is_homogeneous()) {
          CHECK(eq.payoff_a == doctest::Approx(da * phi(sf, da / db)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("equilibrium efforts are best responses") {
  std::vector<SuccessFunctionSpec> specs = homogeneous_specs();
  specs.push_back(SuccessFunctionSpec::ratio_power(0.6));
  specs.push_back(SuccessFunctionSpec::ratio_shifted(0.5, 1.0));
  for (const auto& sf : specs) {
    for (double da : {0.5, 2.0}) {
      const double db = 1.0;
      const auto eq = solve_battle(sf, da, db);
      const auto pay_a = [&](double x) { return win_probability(sf, x, eq.effort_b) * da - x; };
      const auto pay_b = [&](double y) {
        return (1.0 - win_probability(sf, eq.effort_a, y)) * db - y;
      };
      for (double rel : {-1e-4, 1e-4}) {
        CHECK(pay_a(eq.effort_a * (1 + rel)) <= pay_a(eq.effort_a) + 1e-8);
        CHECK(pay_b(eq.effort_b * (1 + rel)) <= pay_b(eq.effort_b) + 1e-8);
      }
    }
  }
}

TEST_CASE("ratio-form power curve agrees with Tullock on a stake-ratio grid") {
  const auto ratio = SuccessFunctionSpec::ratio_power(0.8);
  const auto tull = SuccessFunctionSpec::tullock(0.8);
  const auto r = solve_battle(ratio, 2.0, 1.0);
  const auto t = solve_battle(tull, 2.0, 1.0);
  CHECK(std::abs(r.effort_a - t.effort_a) <= 1e-8);
  CHECK(std::abs(r.payoff_b - t.payoff_b) <= 1e-8);
  for (double k : log_grid(0.05, 20.0, 20)) {
    const auto a = solve_battle(ratio, k, 1.0);
    const auto b = solve_battle(tull, k, 1.0);
    CHECK(std::abs(a.effort_a - b.effort_a) <= 1e-8);
    CHECK(std::abs(a.effort_b - b.effort_b) <= 1e-8);
    CHECK(std::abs(a.win_prob_a - b.win_prob_a) <= 1e-8);
  }
}

TEST_CASE("augmented gain limits") {
  CHECK(augmented_gain(kTullock1, 5.0, 0.0) == doctest::Approx(5.0));
  CHECK(augmented_gain(kTullock1, 1.0, 1.0) == doctest::Approx(0.25));
  CHECK(augmented_gain(kTullock1, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(augmented_gain(kTullock1, -1.0, 1.0), DomainError);
  // Continuity as the rival stake vanishes.
  CHECK(augmented_gain(kTullock1, 1.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  for (double d : {0.5, 1.0, 3.0}) {
    const double g = augmented_gain(kTullock1, 2.0, d);
    CHECK(g == doctest::Approx(solve_battle(kTullock1, 2.0, d).payoff_a));
    CHECK(g >= 0.0);
    CHECK(g <= 2.0);
  }
}

TEST_CASE("psi examples and inverse round trip") {
  CHECK(psi(kTullock1, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi_inverse(kTullock1, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(psi_inverse(kTullock1, 3.0) == doctest::Approx((3.0 + std::sqrt(33.0)) / 2.0).epsilon(1e-13));
  // psi = theta^2 / (theta + 2) for Tullock r=1.
  for (double t : log_grid(1e-3, 1e3, 31)) {
    CHECK(psi(kTullock1, t) == doctest::Approx(t * t / (t + 2.0)).epsilon(1e-12));
  }
  for (const auto& sf : homogeneous_specs()) {
    for (double y : log_grid(1e-4, 1e6, 31)) {
      const double t = psi_inverse(sf, y);
      CHECK(std::abs(psi(sf, t) - y) <= 1e-12 * std::max(1.0, y));
      CHECK(psi(sf, t) < t);
    }
  }
  CHECK_THROWS_AS(psi_inverse(kTullock1, -1.0), DomainError);
}

TEST_CASE("gain-ratio sum stays below one by a margin") {
  for (const auto& sf : homogeneous_specs()) {
    double gap = 1.0;
    for (double k = 1.0; k <= 10.0; k += 0.25) {
      const auto eq = solve_battle(sf, k, 1.0);
      gap = std::min(gap, 1.0 - eq.gain_ratio_a - eq.gain_ratio_b);
    }
    CAPTURE(sf.to_string());
    CHECK(gap > 0.0);
  }
}

TEST_CASE("noisy wrapper shifts gain ratios toward one half") {
  for (double q : {0.2, 0.7, 1.0}) {
    const auto noisy = SuccessFunctionSpec::noisy(kTullock1, q);
    for (double t : {0.1, 1.0, 4.0}) {
      CHECK(phi(noisy, t) == doctest::Approx((1 - q) / 2 + q * phi(kTullock1, t)).epsilon(1e-14));
      CHECK(eval_gamma(noisy, t) ==
            doctest::Approx(q * eval_gamma(kTullock1, t) + (1 - q) / 2).epsilon(1e-14));
    }
  }
}

TEST_CASE("spec text round-trips") {
  for (const char* text : {"tullock:r=1", "serial:alpha=0.5", "ratio:pow,alpha=0.8",
                           "noisy:q=0.7,base=tullock:r=1", "ratio:shifted,alpha=0.5,c=1"}) {
    const auto sf = SuccessFunctionSpec::parse(text);
    CHECK(SuccessFunctionSpec::parse(sf.to_string()).to_string() == sf.to_string());
  }
  CHECK(SuccessFunctionSpec::parse("tullock:r=0.5").param() == 0.5);
  CHECK_THROWS_AS(SuccessFunctionSpec::parse("tullock:r=2"), DomainError);
  CHECK_THROWS_AS(SuccessFunctionSpec::parse("bogus:r=1"), ValidationError);
  CHECK_THROWS_AS(SuccessFunctionSpec::parse("noisy:q=0"), ContestError);
  CHECK_THROWS_AS(SuccessFunctionSpec::parse("serial:alpha=1"), DomainError);
  CHECK(SuccessFunctionSpec::parse("noisy:q=0.7,base=tullock:r=1").to_string() ==
        "noisy:q=0.7,base=tullock:r=1");
}

TEST_CASE("shipped ratio curves are concave with bounded elasticity") {
  for (const auto& sf : {SuccessFunctionSpec::ratio_power(0.8),
                         SuccessFunctionSpec::ratio_shifted(0.5, 1.0)}) {
    CHECK(sf.curve_value(0.0) == 0.0);
    double prev_slope = INFINITY;
    double min_elast = INFINITY;
    for (double x : log_grid(1e-4, 1e4, 81)) {
      const double s = sf.curve_slope(x);
      CHECK(s > 0.0);
      CHECK(s < prev_slope);
      prev_slope = s;
      min_elast = std::min(min_elast, x * s / sf.curve_value(x));
    }
    CHECK(min_elast > 0.0);
    CHECK(min_elast >= 1.0 / sf.elasticity_bound() - 1e-12);
  }
}

TEST_CASE("balanced gain ratio") {
  CHECK(balanced_gain_ratio(kTullock1) == doctest::Approx(0.25));
  CHECK(balanced_gain_ratio(SuccessFunctionSpec::ratio_power(0.8)) ==
        doctest::Approx(phi(SuccessFunctionSpec::tullock(0.8), 1.0)).epsilon(1e-8));
}
