// Copyright 2026 The ramanbs Authors
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

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "ramanbs/error.hpp"

namespace ramanbs {

/// Interval [lo, hi] with f(lo) <= target <= f(hi) for an increasing f.
struct Bracket {
    double lo;
    double f_lo;
    double hi;
    double f_hi;
};

/// Outcome of a ladder scan; `bracket` is empty when the target was not
/// reached below the cap, in which case `best` is the largest value seen.
struct LadderScan {
    std::optional<Bracket> bracket;
    double best_x = 0.0;
    double best_f = 0.0;
};

/// Maximum decrease tolerated between successive samples of a function
/// that is supposed to be non-decreasing (absorbs round-off and the
/// discretisation noise of the forward model).
inline constexpr double kMonotoneSlack = 1e-7;

/// Scan x = x0, growth * x0, ... up to `cap` (inclusive) for an increasing
/// f, starting from the known point (0, f0). Stops at the first sample with
/// f >= target. Throws non_monotone_bracket if the samples decrease.
template <class F>
LadderScan scan_increasing(F&& f, double f0, double x0, double growth, double cap,
                           double target) {
    require(x0 > 0 && growth > 1 && cap >= x0, ErrorKind::invalid_argument,
            "ladder scan: bad parameters");
    double prev_x = 0.0;
    double prev_f = f0;
    LadderScan scan{std::nullopt, 0.0, f0};
    double x = x0;
    while (true) {
        const double fx = f(x);
        if (fx < prev_f - kMonotoneSlack) {
            std::ostringstream os;
            os << "efficiency decreases between " << prev_x << " (" << prev_f << ") and "
               << x << " (" << fx << ")";
            throw Error(ErrorKind::non_monotone_bracket, os.str());
        }
        scan.best_x = x;
        scan.best_f = fx;
        if (fx >= target) {
            scan.bracket = Bracket{prev_x, prev_f, x, fx};
            return scan;
        }
        if (x >= cap) return scan;
        prev_x = x;
        prev_f = fx;
        x = std::min(cap, x * growth);
    }
}

struct RootResult {
    double x;
    double fx;
    int iterations;
};

/// Bisection for f(x) = target on an increasing f. Terminates when
/// |f - target| <= ftol or the bracket collapses. Every midpoint value must
/// lie between the current end values, otherwise the map is not monotone
/// on the bracket and a non_monotone_bracket error is raised.
template <class F>
RootResult bisect_increasing(F&& f, Bracket b, double target, double ftol,
                             int max_iterations = 200) {
    require(b.f_lo <= target + ftol && b.f_hi >= target - ftol,
            ErrorKind::invalid_argument, "bisection: target is not bracketed");
    if (std::abs(b.f_lo - target) <= ftol) return {b.lo, b.f_lo, 0};
    if (std::abs(b.f_hi - target) <= ftol) return {b.hi, b.f_hi, 0};
    for (int it = 1; it <= max_iterations; ++it) {
        const double mid = 0.5 * (b.lo + b.hi);
        const double fm = f(mid);
        if (fm < b.f_lo - kMonotoneSlack || fm > b.f_hi + kMonotoneSlack) {
            std::ostringstream os;
            os << "map is not monotone on [" << b.lo << ", " << b.hi << "]: f(" << mid
               << ") = " << fm;
            throw Error(ErrorKind::non_monotone_bracket, os.str());
        }
        if (std::abs(fm - target) <= ftol || mid == b.lo || mid == b.hi)
            return {mid, fm, it};
        if (fm < target) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    throw Error(ErrorKind::non_convergence, "bisection: iteration limit reached");
}

}  // namespace ramanbs
