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

// Battle technology: success functions, the gain function phi, the psi map
// and single-battle Nash equilibria.

#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace contest {

enum class SfKind { kTullock, kSerial, kRatioForm, kNoisy };
enum class RatioCurve { kPower, kShifted };

/// Parametric battle success function.
///
/// Tullock and Serial are homogeneous of degree zero: p(x', x) = gamma(x'/x).
/// RatioForm is p(x', x) = g(x') / (g(x') + g(x)) for a concave curve g.
/// Noisy mixes any base with a fair coin: q * p + (1 - q) / 2.
class SuccessFunctionSpec {
 public:
  static SuccessFunctionSpec tullock(double r);
  static SuccessFunctionSpec serial(double alpha);
  /// g(x) = x^alpha.
  static SuccessFunctionSpec ratio_power(double alpha);
  /// g(x) = (x + c)^alpha - c^alpha; not homogeneous, so the prize level matters.
  static SuccessFunctionSpec ratio_shifted(double alpha, double c);
  static SuccessFunctionSpec noisy(const SuccessFunctionSpec& base, double q);

  /// Parses `tullock:r=1`, `serial:alpha=0.5`, `ratio:pow,alpha=0.8`,
  /// `ratio:shifted,alpha=0.5,c=1`, `noisy:q=0.7,base=<spec>`.
  /// `base=` must be the last pair of a noisy spec; it consumes the rest.
  static SuccessFunctionSpec parse(std::string_view text);
  std::string to_string() const;

  SfKind kind() const noexcept { return kind_; }
  RatioCurve curve() const noexcept { return curve_; }
  double param() const noexcept { return p1_; }
  double shift() const noexcept { return p2_; }
  double noise_q() const noexcept { return p1_; }
  const SuccessFunctionSpec& base() const { return *base_; }

  /// True when p depends on the effort ratio only (Tullock, Serial, and
  /// Noisy over either).
  bool is_homogeneous() const noexcept;

  // Ratio-form curve and its derivative; only valid for kRatioForm.
  double curve_value(double x) const;
  double curve_slope(double x) const;
  /// C >= 1 with x g'(x) / g(x) in [1/C, 1].
  double elasticity_bound() const;

 private:
  SuccessFunctionSpec() = default;

  SfKind kind_ = SfKind::kTullock;
  RatioCurve curve_ = RatioCurve::kPower;
  double p1_ = 1.0;
  double p2_ = 0.0;
  std::shared_ptr<const SuccessFunctionSpec> base_;
};

struct BattleEquilibrium {
  double effort_a = 0.0;
  double effort_b = 0.0;
  double win_prob_a = 0.5;
  double payoff_a = 0.0;
  double payoff_b = 0.0;
  double gain_ratio_a = 0.0;
  double gain_ratio_b = 0.0;

  double win_prob_b() const noexcept { return 1.0 - win_prob_a; }
};

/// Probability that A wins given efforts; (0,0) is a fair coin.
double win_probability(const SuccessFunctionSpec& sf, double effort_a, double effort_b);

/// gamma(theta) for homogeneous kinds; theta may be +inf.
double eval_gamma(const SuccessFunctionSpec& sf, double theta);
double eval_gamma_prime(const SuccessFunctionSpec& sf, double theta);

/// phi(theta) = gamma(theta) - theta gamma'(theta). Beyond theta = 1e12 the
/// value is capped at 1 - 1e-15; phi(+inf) is the exact limit.
double phi(const SuccessFunctionSpec& sf, double theta);

/// Pure-strategy Nash equilibrium of one battle with winning values
/// delta_a, delta_b > 0. Homogeneous kinds use the closed form; ratio-form
/// kinds solve the two first-order conditions by nested bisection.
BattleEquilibrium solve_battle(const SuccessFunctionSpec& sf, double delta_a, double delta_b);

/// Battle payoff Pi*(delta', delta), extended continuously to zero stakes.
double augmented_gain(const SuccessFunctionSpec& sf, double delta_prime, double delta);

/// psi(theta) = theta phi(theta) / (1 - phi(1/theta)); strictly increasing.
double psi(const SuccessFunctionSpec& sf, double theta);
double psi_inverse(const SuccessFunctionSpec& sf, double y);

/// Gain ratio of a balanced battle. phi(1) for homogeneous kinds; for
/// ratio-form kinds the minimum over stake levels in [1e-9, 1] * prize.
double balanced_gain_ratio(const SuccessFunctionSpec& sf, double prize = 1.0);

}  // namespace contest
