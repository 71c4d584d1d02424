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

// Homogeneous gain functions templated on the number type, with the
// complements 1 - phi evaluated without cancellation. The closed-form
// recursions run on double for solutions and on a wide-exponent MPFR type
// for tail diagnostics, where plain tug-of-war increments fall below the
// double range after a handful of states.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "contest/error.hpp"
#include "contest/success.hpp"

namespace contest::detail {

template <class Real>
class HomogeneousGain {
 public:
  explicit HomogeneousGain(const SuccessFunctionSpec& sf) {
    const SuccessFunctionSpec* cur = &sf;
    double q = 1.0;
    while (cur->kind() == SfKind::kNoisy) {
      q *= cur->noise_q();
      cur = &cur->base();
    }
    if (cur->kind() != SfKind::kTullock && cur->kind() != SfKind::kSerial) {
      throw UnsupportedKindError("closed form needs a homogeneous success function");
    }
    serial_ = cur->kind() == SfKind::kSerial;
    param_ = cur->param();
    q_ = q;
  }

  // Returns (gamma, theta gamma', phi, 1 - phi) at theta.
  struct Eval {
    Real gamma, slope, phi, phi_c;
  };

  Eval eval(const Real& theta) const {
    using std::isinf;
    using std::pow;
    Eval e;
    if (isinf(theta)) {
      e = {Real(1), Real(0), Real(1), Real(0)};
    } else if (theta == 0) {
      e = {Real(0), Real(0), Real(0), Real(1)};
    } else if (!serial_) {
      const Real t = pow(theta, Real(param_));
      const Real one_t = 1 + t;
      const Real sq = one_t * one_t;
      e.gamma = t / one_t;
      e.slope = param_ * t / sq;
      e.phi = t * ((1 - param_) + t) / sq;  // keeps t^2 when t is tiny and r = 1
      e.phi_c = (1 + t + param_ * t) / sq;
    } else if (theta >= 1) {
      const Real u = pow(theta, Real(-param_));
      e.gamma = 1 - u / 2;
      e.slope = param_ * u / 2;
      e.phi = 1 - (1 + param_) * u / 2;
      e.phi_c = (1 + param_) * u / 2;
    } else {
      const Real w = pow(theta, Real(param_));
      e.gamma = w / 2;
      e.slope = param_ * w / 2;
      e.phi = (1 - param_) * w / 2;
      e.phi_c = 1 - (1 - param_) * w / 2;
    }
    if (q_ != 1.0) {
      const Real half_noise = Real((1.0 - q_) / 2.0);
      e.gamma = q_ * e.gamma + half_noise;
      e.slope = q_ * e.slope;
      e.phi = q_ * e.phi + half_noise;
      e.phi_c = q_ * e.phi_c + half_noise;
    }
    return e;
  }

  Real phi(const Real& theta) const { return eval(theta).phi; }
  Real phi_c(const Real& theta) const { return eval(theta).phi_c; }

  Real psi(const Real& theta) const {
    return theta * eval(theta).phi / eval(Real(1) / theta).phi_c;
  }

  /// Bisection on [y, 2^j y]; psi(theta) < theta keeps the root above y.
  Real psi_inverse(const Real& y, const Real& rel_tol, const Real& guard) const {
    using std::sqrt;
    Real lo = y;
    Real hi = 2 * y;
    while (psi(hi) < y) {
      hi *= 2;
      if (hi > guard) throw DomainError("psi_inverse: bracket expansion exceeded guard");
    }
    for (int it = 0; it < 2000 && hi - lo > rel_tol * hi; ++it) {
      const Real mid = (hi > 4 * lo) ? Real(sqrt(lo) * sqrt(hi)) : Real((lo + hi) / 2);
      if (mid <= lo || mid >= hi) break;
      if (psi(mid) < y) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return (lo + hi) / 2;
  }

 private:
  bool serial_ = false;
  double param_ = 1.0;
  double q_ = 1.0;
};

/// Increments of the normalized tug-of-war intermediate values:
/// d[j-1] = D(j) - D(j-1) and e[j-1] = D(1-j) - D(-j) for j = 1..n, all
/// positive, built by a recursion free of subtractions.
template <class Real>
struct TowIncrements {
  std::vector<Real> d, e, theta;
  Real up_total = 0;    // D(n)
  Real down_total = 0;  // -D(-n)
};

template <class Real, class InverseFn>
TowIncrements<Real> tow_increments(const HomogeneousGain<Real>& g, int n, double reset_p,
                                   InverseFn&& psi_inv) {
  using std::isinf;
  TowIncrements<Real> out;
  const Real p = reset_p;
  const Real keep = 1 - p;
  const auto center = g.eval(Real(1));
  Real d = center.phi_c;  // D(1) = 1 - phi(1)
  Real e = center.phi;    // -D(-1) = phi(1)
  Real up = d;            // D(k)
  Real down = e;          // -D(-k)
  Real up_prev = 0;       // D(k-1)
  out.d.push_back(d);
  out.e.push_back(e);
  for (int k = 1; k < n; ++k) {
    const Real num = d + p * up_prev;
    const Real den = p * down + keep * e;
    const Real y = num / den;
    const Real theta = (isinf(y) || den == 0) ? Real(std::numeric_limits<double>::infinity())
                                               : psi_inv(y);
    out.theta.push_back(theta);
    const auto hi = g.eval(theta);
    const auto lo = g.eval(Real(1) / theta);
    const Real nd = (hi.phi == 0) ? Real(0) : Real((d * hi.phi_c + p * up / keep) / hi.phi);
    const Real ne = (p * down / keep + lo.phi * e) / lo.phi_c;
    up_prev = up;
    d = nd;
    e = ne;
    up += d;
    down += e;
    out.d.push_back(d);
    out.e.push_back(e);
  }
  out.up_total = up;
  out.down_total = down;
  return out;
}

}  // namespace contest::detail
