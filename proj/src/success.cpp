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

#include "contest/success.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "contest/error.hpp"
#include "contest/rootfind.hpp"

namespace contest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhiCapTheta = 1e12;
constexpr double kPhiCap = 1.0 - 1e-15;
constexpr double kFocTol = 1e-12;

// Shortest text that parses back to the same double.
std::string fmt_num(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void require_homogeneous(const SuccessFunctionSpec& sf, const char* op) {
  if (!sf.is_homogeneous()) {
    throw UnsupportedKindError(std::string(op) + ": success function " + sf.to_string() +
                               " is not homogeneous");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view key, std::string_view text) {
  std::string buf(trim(text));
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value)) {
    throw ValidationError("success function: bad value for '" + std::string(key) + "': '" +
                          buf + "'");
  }
  return value;
}

struct KeyValue {
  std::string key;
  std::string value;
};

std::vector<KeyValue> split_pairs(std::string_view body) {
  std::vector<KeyValue> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    std::string_view item = trim(body.substr(0, comma));
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      out.push_back({std::string(item), ""});
    } else {
      out.push_back({std::string(trim(item.substr(0, eq))), std::string(item.substr(eq + 1))});
    }
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

// Homogeneous gamma and gamma' of the non-noisy kinds.
double base_gamma(const SuccessFunctionSpec& sf, double theta) {
  if (theta == kInf) return 1.0;
  if (theta <= 0.0) return 0.0;
  if (sf.kind() == SfKind::kTullock) {
    const double t = std::pow(theta, sf.param());
    return std::isinf(t) ? 1.0 : t / (1.0 + t);
  }
  const double a = sf.param();
  return theta >= 1.0 ? 1.0 - 0.5 * std::pow(theta, -a) : 0.5 * std::pow(theta, a);
}

double base_gamma_prime(const SuccessFunctionSpec& sf, double theta) {
  if (theta == kInf) return 0.0;
  if (sf.kind() == SfKind::kTullock) {
    const double r = sf.param();
    if (theta <= 0.0) return r < 1.0 ? kInf : 1.0;
    const double t = std::pow(theta, r);
    return r * (t / theta) / ((1.0 + t) * (1.0 + t));
  }
  const double a = sf.param();
  if (theta <= 0.0) return kInf;
  return theta >= 1.0 ? 0.5 * a * std::pow(theta, -a - 1.0) : 0.5 * a * std::pow(theta, a - 1.0);
}

double base_phi(const SuccessFunctionSpec& sf, double theta) {
  if (theta == kInf) return 1.0;
  if (theta <= 0.0) return 0.0;
  double value;
  if (sf.kind() == SfKind::kTullock) {
    const double r = sf.param();
    const double t = std::pow(theta, r);
    if (std::isinf(t)) return kPhiCap;
    value = t * (1.0 + t - r) / ((1.0 + t) * (1.0 + t));
  } else {
    const double a = sf.param();
    value = theta >= 1.0 ? 1.0 - 0.5 * (1.0 + a) * std::pow(theta, -a)
                         : 0.5 * (1.0 - a) * std::pow(theta, a);
  }
  if (theta > kPhiCapTheta) value = std::min(value, kPhiCap);
  return value;
}

// Ratio-form battle. Outer variable t = x_a / x_b is bisected on the ratio
// condition g(x_a) g'(x_b) / (g'(x_a) g(x_b)) = delta_a / delta_b; the inner
// scale x_b solves A's first-order condition for the current t.
BattleEquilibrium solve_ratio_battle(const SuccessFunctionSpec& sf, double da, double db) {
  const auto g = [&](double x) { return sf.curve_value(x); };
  const auto dg = [&](double x) { return sf.curve_slope(x); };

  // A's FOC residual in log form, increasing in the scale s.
  const auto foc_a = [&](double t, double s) {
    const double xa = t * s;
    return 2.0 * std::log(g(xa) + g(s)) - std::log(da * dg(xa) * g(s));
  };
  const auto scale_for = [&](double t) {
    const auto h = [&](double s) { return foc_a(t, s); };
    double hi = rootfind::expand_upper(h, 0.0, std::max(da, db));
    double lo = rootfind::expand_lower(h, 0.0, hi * 0.5);
    return rootfind::solve_increasing(h, 0.0, lo, hi, 1e-15);
  };
  const double log_rho = std::log(da / db);
  const auto ratio_gap = [&](double t) {
    const double s = scale_for(t);
    const double xa = t * s;
    return std::log(g(xa) / dg(xa)) - std::log(g(s) / dg(s)) - log_rho;
  };

  const double c = sf.elasticity_bound();
  const double rho = da / db;
  double lo = rootfind::expand_lower(ratio_gap, 0.0, rho / c);
  double hi = rootfind::expand_upper(ratio_gap, 0.0, rho * c);
  const double t = rootfind::solve_increasing(ratio_gap, 0.0, lo, hi, 1e-15);
  const double xb = scale_for(t);
  const double xa = t * xb;

  const double ga = g(xa), gb = g(xb);
  const double denom = (ga + gb) * (ga + gb);
  const double res_a = std::abs(da * dg(xa) * gb / denom - 1.0);
  const double res_b = std::abs(db * dg(xb) * ga / denom - 1.0);
  const double res = std::max(res_a, res_b);
  if (!(res <= kFocTol)) {
    throw ConvergenceError("ratio-form battle first-order conditions", res, 0);
  }

  BattleEquilibrium eq;
  eq.effort_a = xa;
  eq.effort_b = xb;
  eq.win_prob_a = ga / (ga + gb);
  eq.payoff_a = eq.win_prob_a * da - xa;
  eq.payoff_b = (1.0 - eq.win_prob_a) * db - xb;
  eq.gain_ratio_a = eq.payoff_a / da;
  eq.gain_ratio_b = eq.payoff_b / db;
  return eq;
}

}  // namespace

SuccessFunctionSpec SuccessFunctionSpec::tullock(double r) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("tullock: r must lie in (0, 1]");
  SuccessFunctionSpec sf;
  sf.kind_ = SfKind::kTullock;
  sf.p1_ = r;
  return sf;
}

SuccessFunctionSpec SuccessFunctionSpec::serial(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("serial: alpha must lie in (0, 1)");
  SuccessFunctionSpec sf;
  sf.kind_ = SfKind::kSerial;
  sf.p1_ = alpha;
  return sf;
}

SuccessFunctionSpec SuccessFunctionSpec::ratio_power(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ratio:pow: alpha must lie in (0, 1)");
  SuccessFunctionSpec sf;
  sf.kind_ = SfKind::kRatioForm;
  sf.curve_ = RatioCurve::kPower;
  sf.p1_ = alpha;
  return sf;
}

SuccessFunctionSpec SuccessFunctionSpec::ratio_shifted(double alpha, double c) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("ratio:shifted: alpha must lie in (0, 1)");
  }
  if (!(c > 0.0 && std::isfinite(c))) throw DomainError("ratio:shifted: c must be positive");
  SuccessFunctionSpec sf;
  sf.kind_ = SfKind::kRatioForm;
  sf.curve_ = RatioCurve::kShifted;
  sf.p1_ = alpha;
  sf.p2_ = c;
  return sf;
}

SuccessFunctionSpec SuccessFunctionSpec::noisy(const SuccessFunctionSpec& base, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("noisy: q must lie in (0, 1]");
  SuccessFunctionSpec sf;
  sf.kind_ = SfKind::kNoisy;
  sf.p1_ = q;
  sf.base_ = std::make_shared<const SuccessFunctionSpec>(base);
  return sf;
}

SuccessFunctionSpec SuccessFunctionSpec::parse(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("success function '" + std::string(text) + "': expected kind:key=value");
  }
  const std::string kind(trim(text.substr(0, colon)));
  std::string_view body = text.substr(colon + 1);

  if (kind == "noisy") {
    const auto pos = body.find("base=");
    if (pos == std::string_view::npos) throw ValidationError("noisy: missing base=");
    const std::string_view base_text = body.substr(pos + 5);
    std::string_view head = trim(body.substr(0, pos));
    if (!head.empty() && head.back() == ',') head.remove_suffix(1);
    double q = -1.0;
    for (const auto& kv : split_pairs(head)) {
      if (kv.key == "q") {
        q = parse_number(kv.key, kv.value);
      } else {
        throw ValidationError("noisy: unknown key '" + kv.key + "'");
      }
    }
    if (q < 0.0) throw ValidationError("noisy: missing q=");
    return noisy(parse(base_text), q);
  }

  const auto pairs = split_pairs(body);
  const auto lookup = [&](const std::string& key) {
    for (const auto& kv : pairs) {
      if (kv.key == key) return parse_number(key, kv.value);
    }
    throw ValidationError(kind + ": missing " + key + "=");
  };
  const auto only_keys = [&](std::initializer_list<std::string_view> keys, std::size_t skip) {
    for (std::size_t i = skip; i < pairs.size(); ++i) {
      if (std::find(keys.begin(), keys.end(), pairs[i].key) == keys.end()) {
        throw ValidationError(kind + ": unknown key '" + pairs[i].key + "'");
      }
    }
  };

  if (kind == "tullock") {
    only_keys({"r"}, 0);
    return tullock(lookup("r"));
  }
  if (kind == "serial") {
    only_keys({"alpha"}, 0);
    return serial(lookup("alpha"));
  }
  if (kind == "ratio") {
    if (pairs.empty() || !pairs.front().value.empty()) {
      throw ValidationError("ratio: expected curve name first (pow or shifted)");
    }
    const std::string& curve = pairs.front().key;
    if (curve == "pow") {
      only_keys({"alpha"}, 1);
      return ratio_power(lookup("alpha"));
    }
    if (curve == "shifted") {
      only_keys({"alpha", "c"}, 1);
      return ratio_shifted(lookup("alpha"), lookup("c"));
    }
    throw ValidationError("ratio: unknown curve '" + curve + "'");
  }
  throw ValidationError("unknown success function kind '" + kind + "'");
}

std::string SuccessFunctionSpec::to_string() const {
  switch (kind_) {
    case SfKind::kTullock:
      return "tullock:r=" + fmt_num(p1_);
    case SfKind::kSerial:
      return "serial:alpha=" + fmt_num(p1_);
    case SfKind::kRatioForm:
      if (curve_ == RatioCurve::kPower) return "ratio:pow,alpha=" + fmt_num(p1_);
      return "ratio:shifted,alpha=" + fmt_num(p1_) + ",c=" + fmt_num(p2_);
    case SfKind::kNoisy:
      return "noisy:q=" + fmt_num(p1_) + ",base=" + base_->to_string();
  }
  return {};
}

bool SuccessFunctionSpec::is_homogeneous() const noexcept {
  switch (kind_) {
    case SfKind::kTullock:
    case SfKind::kSerial:
      return true;
    case SfKind::kRatioForm:
      return false;
    case SfKind::kNoisy:
      return base_->is_homogeneous();
  }
  return false;
}

double SuccessFunctionSpec::curve_value(double x) const {
  if (curve_ == RatioCurve::kPower) return std::pow(x, p1_);
  // (x + c)^a - c^a, written to avoid cancellation for small x.
  return std::pow(p2_, p1_) * std::expm1(p1_ * std::log1p(x / p2_));
}

double SuccessFunctionSpec::curve_slope(double x) const {
  if (curve_ == RatioCurve::kPower) return p1_ * std::pow(x, p1_ - 1.0);
  return p1_ * std::pow(x + p2_, p1_ - 1.0);
}

double SuccessFunctionSpec::elasticity_bound() const {
  if (kind_ != SfKind::kRatioForm) throw UnsupportedKindError("elasticity bound: ratio form only");
  return 1.0 / p1_;
}

double win_probability(const SuccessFunctionSpec& sf, double effort_a, double effort_b) {
  if (effort_a < 0.0 || effort_b < 0.0) throw DomainError("win_probability: negative effort");
  if (effort_a == 0.0 && effort_b == 0.0) return 0.5;
  switch (sf.kind()) {
    case SfKind::kTullock:
    case SfKind::kSerial:
      return base_gamma(sf, effort_b == 0.0 ? kInf : effort_a / effort_b);
    case SfKind::kRatioForm: {
      const double ga = sf.curve_value(effort_a);
      const double gb = sf.curve_value(effort_b);
      return ga / (ga + gb);
    }
    case SfKind::kNoisy:
      return sf.noise_q() * win_probability(sf.base(), effort_a, effort_b) +
             0.5 * (1.0 - sf.noise_q());
  }
  return 0.5;
}

double eval_gamma(const SuccessFunctionSpec& sf, double theta) {
  require_homogeneous(sf, "eval_gamma");
  if (!(theta >= 0.0)) throw DomainError("eval_gamma: theta must be nonnegative");
  if (sf.kind() == SfKind::kNoisy) {
    return sf.noise_q() * eval_gamma(sf.base(), theta) + 0.5 * (1.0 - sf.noise_q());
  }
  return base_gamma(sf, theta);
}

double eval_gamma_prime(const SuccessFunctionSpec& sf, double theta) {
  require_homogeneous(sf, "eval_gamma_prime");
  if (!(theta >= 0.0)) throw DomainError("eval_gamma_prime: theta must be nonnegative");
  if (sf.kind() == SfKind::kNoisy) return sf.noise_q() * eval_gamma_prime(sf.base(), theta);
  return base_gamma_prime(sf, theta);
}

double phi(const SuccessFunctionSpec& sf, double theta) {
  require_homogeneous(sf, "phi");
  if (!(theta >= 0.0)) throw DomainError("phi: theta must be nonnegative");
  if (sf.kind() == SfKind::kNoisy) {
    return sf.noise_q() * phi(sf.base(), theta) + 0.5 * (1.0 - sf.noise_q());
  }
  return base_phi(sf, theta);
}

BattleEquilibrium solve_battle(const SuccessFunctionSpec& sf, double delta_a, double delta_b) {
  if (!(delta_a > 0.0) || !(delta_b > 0.0) || !std::isfinite(delta_a) ||
      !std::isfinite(delta_b)) {
    throw DomainError("solve_battle: stakes must be positive and finite");
  }
  if (sf.is_homogeneous()) {
    const double ratio = delta_a / delta_b;
    const double inv = delta_b / delta_a;
    BattleEquilibrium eq;
    eq.effort_a = delta_b * eval_gamma_prime(sf, inv);
    eq.effort_b = delta_a * eval_gamma_prime(sf, ratio);
    eq.win_prob_a = eval_gamma(sf, ratio);
    eq.gain_ratio_a = phi(sf, ratio);
    eq.gain_ratio_b = phi(sf, inv);
    eq.payoff_a = delta_a * eq.gain_ratio_a;
    eq.payoff_b = delta_b * eq.gain_ratio_b;
    return eq;
  }
  if (sf.kind() == SfKind::kNoisy) {
    // Best responses under q p + (1-q)/2 coincide with those under p at
    // stakes scaled by q.
    const double q = sf.noise_q();
    BattleEquilibrium eq = solve_battle(sf.base(), q * delta_a, q * delta_b);
    eq.win_prob_a = q * eq.win_prob_a + 0.5 * (1.0 - q);
    eq.payoff_a = eq.win_prob_a * delta_a - eq.effort_a;
    eq.payoff_b = (1.0 - eq.win_prob_a) * delta_b - eq.effort_b;
    eq.gain_ratio_a = eq.payoff_a / delta_a;
    eq.gain_ratio_b = eq.payoff_b / delta_b;
    return eq;
  }
  return solve_ratio_battle(sf, delta_a, delta_b);
}

double augmented_gain(const SuccessFunctionSpec& sf, double delta_prime, double delta) {
  if (!(delta_prime >= 0.0) || !(delta >= 0.0)) {
    throw DomainError("augmented_gain: stakes must be nonnegative");
  }
  if (delta_prime == 0.0) return 0.0;
  if (delta > 0.0) return solve_battle(sf, delta_prime, delta).payoff_a;
  if (sf.is_homogeneous()) return delta_prime * phi(sf, kInf);
  // No symbolic limit for ratio-form kinds; evaluate at a vanishing opponent stake.
  return solve_battle(sf, delta_prime, delta_prime * 1e-9).payoff_a;
}

double psi(const SuccessFunctionSpec& sf, double theta) {
  require_homogeneous(sf, "psi");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("psi: theta must be positive");
  // 1 - phi(1/theta) = gamma(theta) + theta gamma'(theta) by gamma(x) + gamma(1/x) = 1.
  return theta * phi(sf, theta) /
         (eval_gamma(sf, theta) + theta * eval_gamma_prime(sf, theta));
}

double psi_inverse(const SuccessFunctionSpec& sf, double y) {
  require_homogeneous(sf, "psi_inverse");
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("psi_inverse: y must be positive");
  const auto f = [&](double theta) { return psi(sf, theta); };
  // psi(theta) < theta, so the root lies above y.
  const double lo = rootfind::expand_lower(f, y, y);
  const double hi = rootfind::expand_upper(f, y, 2.0 * y);
  return rootfind::solve_increasing(f, y, lo, hi, 1e-14);
}

double balanced_gain_ratio(const SuccessFunctionSpec& sf, double prize) {
  if (sf.is_homogeneous()) return phi(sf, 1.0);
  double lowest = 1.0;
  for (int k = 0; k <= 36; ++k) {
    const double stake = prize * std::pow(10.0, -9.0 + 0.25 * k);
    lowest = std::min(lowest, solve_battle(sf, stake, stake).gain_ratio_a);
  }
  return lowest;
}

}  // namespace contest
