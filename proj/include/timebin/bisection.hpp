// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <utility>

namespace timebin::detail {

/// Bisection for f(x) = target on [lo, hi] where f is monotone and the
/// target is bracketed. Stops once |f(mid) - target| <= f_tol or the
/// bracket can no longer shrink in floating point.
template <class F>
double bisect(F&& f, double target, double lo, double hi, double f_tol = 1e-9) {
    const bool increasing = f(hi) > f(lo);
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            return mid;
        }
        const double value = f(mid);
        if (std::abs(value - target) <= f_tol) {
            return mid;
        }
        if ((value < target) == increasing) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace timebin::detail
