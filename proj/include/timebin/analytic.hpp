// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Closed forms for the post-selected two-photon Franson experiment:
// single-photon detection density, coincidence probability, fringe
// visibility, and the thresholds derived from them.
#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "timebin/bisection.hpp"
#include "timebin/core_model.hpp"
#include "timebin/errors.hpp"

namespace timebin {

/// Visibility needed to violate the CHSH inequality.
inline constexpr double kChshVisibility = 1.0 / std::numbers::sqrt2;

struct VisibilityResult {
    double v;
    double envelope_prefactor; ///< exp(-Gamma'/2 (|T-dtau1|+|T-dtau2|) - Gamma |dtau1-dtau2|)
    double bracket;            ///< 1 + e^{-Gamma'|d|/2} cosh(...) (T2/2T1 - 1)
};

struct CoincidenceResult {
    double p12;
    double prefactor; ///< 2 R_BS T_BS R1 T1 R2 T2
    double phase;
};

/// Time-averaged single-photon detection density |mu(t - tau - t0)|^2.
/// Heaviside convention H(0) = 1.
inline double detection_density(const DerivedRates& rates, double t, double t0, double tau) {
    const double s = t - tau - t0;
    if (s < 0.0) {
        return 0.0;
    }
    return rates.gamma_prime * std::exp(-rates.gamma_prime * s);
}

/// Fringe visibility of the two-photon coincidence rate.
inline VisibilityResult visibility(const DerivedRates& rates, const OpticsConfig& config) {
    const double gp = rates.gamma_prime;
    const double T = config.emission_delay_ps;
    const double a = std::abs(T - config.interf1.d_tau_ps);
    const double b = std::abs(T - config.interf2.d_tau_ps);
    const double d = std::abs(config.interf1.d_tau_ps - config.interf2.d_tau_ps);

    VisibilityResult out{};
    out.envelope_prefactor = std::exp(-0.5 * gp * (a + b) - rates.gamma * d);

    // e^{-gp d/2} cosh(gp (a-b)/2) folded into one pair of exponentials.
    // |a - b| <= d, so neither exponent is positive.
    const double x = 0.5 * gp * (a - b);
    const double half = 0.5 * gp * d;
    const double damped_cosh = 0.5 * (std::exp(x - half) + std::exp(-x - half));

    out.bracket = 1.0 + damped_cosh * (rates.indistinguishability - 1.0);
    out.v = out.envelope_prefactor * out.bracket;
    return out;
}

inline double coincidence_prefactor(const OpticsConfig& c) {
    return 2.0 * c.r_bs * c.t_bs * c.interf1.r * c.interf1.t * c.interf2.r * c.interf2.t;
}

/// Coincidence probability at an explicit interferometer phase difference.
inline CoincidenceResult coincidence_probability(const DerivedRates& rates, const OpticsConfig& config,
                                                 double phase) {
    CoincidenceResult out{};
    out.prefactor = coincidence_prefactor(config);
    out.phase = phase;
    out.p12 = out.prefactor * (1.0 + visibility(rates, config).v * std::cos(phase));
    return out;
}

/// Coincidence probability with the phase taken from the emitter's carrier.
inline CoincidenceResult coincidence_probability(const DerivedRates& rates, const OpticsConfig& config,
                                                 const CarrierSpec& carrier) {
    const double delta = config.interf1.d_tau_ps - config.interf2.d_tau_ps;
    return coincidence_probability(rates, config, carrier_phase(carrier, delta));
}

/// Visibility with both interferometers matched to the emission delay.
inline double max_visibility(const DerivedRates& rates) { return rates.indistinguishability; }

/// First-order fractional visibility loss for emission-delay drift |dT|.
inline double jitter_sensitivity(const DerivedRates& rates, double jitter_ps) {
    if (!(jitter_ps >= 0.0)) {
        throw InvalidParameter("jitter_ps", "must be >= 0");
    }
    return rates.gamma_prime * jitter_ps;
}

/// Smallest Purcell factor whose maximum visibility reaches `target`.
/// The emitter's own purcell_factor is ignored.
inline double chsh_threshold_purcell(EmitterParams emitter, double target = kChshVisibility) {
    if (!(target > 0.0 && target < 1.0)) {
        throw InvalidParameter("target", "must lie in (0, 1)");
    }
    constexpr double kMinF = 1.0;
    constexpr double kMaxF = 1e6;
    auto v_of = [&](double f) {
        emitter.purcell_factor = f;
        return max_visibility(derive_rates(emitter));
    };
    if (v_of(kMinF) >= target) {
        return kMinF;
    }
    if (v_of(kMaxF) < target) {
        throw TargetUnreachable("maximum visibility stays below target for Purcell factors up to 1e6");
    }
    return detail::bisect(v_of, target, kMinF, kMaxF);
}

struct DelayWindow {
    double delta_ps;          ///< half-width in dtau1 - dtau2
    double delta_wavelengths; ///< c * delta / lambda
    double delta_mm;          ///< c * delta
};

/// Half-width of the arm-mismatch window dtau1 - dtau2 (with dtau1 = T)
/// over which the visibility stays at or above `target`. Empty when the
/// balanced visibility does not exceed the target.
inline std::optional<DelayWindow> delay_tolerance_window(const DerivedRates& rates, OpticsConfig config,
                                                         double wavelength_nm,
                                                         double target = kChshVisibility) {
    if (!(wavelength_nm > 0.0)) {
        throw InvalidParameter("wavelength_nm", "must be positive");
    }
    if (max_visibility(rates) <= target) {
        return std::nullopt;
    }
    const double T = config.emission_delay_ps;
    config.interf1.d_tau_ps = T;
    auto v_of = [&](double delta) {
        config.interf2.d_tau_ps = T - delta;
        return visibility(rates, config).v;
    };
    // Visibility decays at least as e^{-Gamma' delta / 2}; expand until bracketed.
    double hi = 1.0 / rates.gamma_prime;
    while (v_of(hi) >= target) {
        hi *= 2.0;
        if (hi > T) {
            throw TargetUnreachable("delay window exceeds the emission delay");
        }
    }
    const double delta = detail::bisect(v_of, target, 0.0, hi);
    return DelayWindow{delta, kSpeedOfLightNmPerPs * delta / wavelength_nm, kSpeedOfLightMmPerPs * delta};
}

} // namespace timebin
