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

#pragma once

#include <mpfr.h>

#include <boost/multiprecision/mpfr.hpp>
#include <limits>

#include "detail/gain_math.hpp"

namespace contest::detail {

namespace mp = boost::multiprecision;

/// 40 decimal digits with the full MPFR exponent range; tug-of-war ratios
/// grow doubly exponentially in the margin and leave double range fast.
using Wide = mp::number<mp::mpfr_float_backend<40>, mp::et_off>;

inline void widen_exponent_range() {
  mpfr_set_emin(mpfr_get_emin_min());
  mpfr_set_emax(mpfr_get_emax_max());
}

inline double lg(const Wide& x) { return static_cast<double>(mp::log10(x)); }

inline auto wide_inverse(const HomogeneousGain<Wide>& g) {
  return [&g](const Wide& y) {
    return g.psi_inverse(y, Wide("1e-36"), Wide(std::numeric_limits<double>::infinity()));
  };
}

}  // namespace contest::detail
