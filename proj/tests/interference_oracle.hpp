// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference for the fringe visibility. The averaged interference
// term is integrated directly: with u = t1 - tau1, w = t2 - tau2 and both
// photons' correlators e^{-Gamma|.|}, the double integral collapses onto
// x = u - w and is evaluated by adaptive Gauss-Kronrod, split at the kinks.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace timebin::testing {

inline double visibility_by_integration(double gamma_prime, double gamma, double T, double dtau1, double dtau2) {
    using boost::math::quadrature::gauss_kronrod;
    const double s = std::max(dtau1, T) - std::max(dtau2, T);
    const double d = dtau1 - dtau2;
    auto integrand = [&](double x) {
        return std::exp(-gamma_prime * std::abs(x) - gamma * std::abs(x + s - d) - gamma * std::abs(x + s));
    };
    std::vector<double> cuts{0.0, d - s, -s};
    std::ranges::sort(cuts);
    const double inf = std::numeric_limits<double>::infinity();
    double total = gauss_kronrod<double, 61>::integrate(integrand, -inf, cuts.front(), 15, 1e-14);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) {
            total += gauss_kronrod<double, 61>::integrate(integrand, cuts[i], cuts[i + 1], 15, 1e-14);
        }
    }
    total += gauss_kronrod<double, 61>::integrate(integrand, cuts.back(), inf, 15, 1e-14);
    const double prefactor = std::exp(-0.5 * gamma_prime * (std::abs(dtau1 - T) + std::abs(dtau2 - T)));
    return prefactor * 0.5 * gamma_prime * total;
}

} // namespace timebin::testing
