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

// Monotone one-dimensional root finding on (0, +inf).

#pragma once

#include <cmath>
#include <limits>

#include "contest/error.hpp"

namespace contest::rootfind {

inline constexpr double kOverflowGuard = 1e300;

/// Doubles `hi` until f(hi) >= target. f must be nondecreasing.
template <class F>
double expand_upper(F&& f, double target, double hi) {
  while (!(f(hi) >= target)) {
    hi *= 2.0;
    if (!(hi < kOverflowGuard)) {
      throw DomainError("bracket expansion exceeded overflow guard");
    }
  }
  return hi;
}

/// Halves `lo` until f(lo) <= target. f must be nondecreasing; lo > 0.
template <class F>
double expand_lower(F&& f, double target, double lo) {
  while (!(f(lo) <= target)) {
    lo *= 0.5;
    if (!(lo > 1.0 / kOverflowGuard)) {
      throw DomainError("bracket expansion exceeded underflow guard");
    }
  }
  return lo;
}

/// Solves f(x) = target for nondecreasing f on the positive bracket
/// [lo, hi] with f(lo) <= target <= f(hi). Bisection runs in log space to
/// relative width `rel_tol`, then a single secant-slope Newton step is
/// accepted if it stays inside the bracket and reduces |f - target|.
template <class F>
double solve_increasing(F&& f, double target, double lo, double hi,
                        double rel_tol = 1e-14) {
  for (int it = 0; it < 400 && hi - lo > rel_tol * hi; ++it) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const double fx = f(x) - target;
  const double h = std::max(x * 1e-7, std::numeric_limits<double>::min());
  const double slope = (f(x + h) - f(x - h)) / (2.0 * h);
  if (slope > 0.0 && std::isfinite(slope)) {
    const double polished = x - fx / slope;
    if (polished >= lo && polished <= hi &&
        std::abs(f(polished) - target) < std::abs(fx)) {
      x = polished;
    }
  }
  return x;
}

}  // namespace contest::rootfind
