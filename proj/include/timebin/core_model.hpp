// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Emitter and optics parameters plus the rate algebra linking radiative
// decay, pure dephasing, coherence time and Purcell enhancement.
//
// All times are picoseconds, all rates 1/ps.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "timebin/errors.hpp"

namespace timebin {

/// Speed of light in nm/ps.
inline constexpr double kSpeedOfLightNmPerPs = 2.99792458e5;

/// Speed of light in mm/ps.
inline constexpr double kSpeedOfLightMmPerPs = 2.99792458e-1;

//---------------------------------------------------------------------------//
// Optical carrier
//---------------------------------------------------------------------------//

struct AngularFrequency {
    double rad_per_ps;
};

struct Wavelength {
    double nm;
};

/// Carrier phase Omega*(dtau1 - dtau2) given directly.
struct DirectPhase {
    double rad;
};

using CarrierSpec = std::variant<AngularFrequency, Wavelength, DirectPhase>;

inline double angular_frequency(const Wavelength& w) {
    return 2.0 * std::numbers::pi * kSpeedOfLightNmPerPs / w.nm;
}

/// Interferometer phase difference for a given arm-imbalance mismatch.
inline double carrier_phase(const CarrierSpec& carrier, double dtau_difference_ps) {
    struct Visitor {
        double delta;
        double operator()(const AngularFrequency& a) const { return a.rad_per_ps * delta; }
        double operator()(const Wavelength& w) const { return angular_frequency(w) * delta; }
        double operator()(const DirectPhase& p) const { return p.rad; }
    };
    return std::visit(Visitor{dtau_difference_ps}, carrier);
}

inline void check_carrier(const CarrierSpec& carrier) {
    if (const auto* w = std::get_if<Wavelength>(&carrier)) {
        if (!(w->nm > 0.0) || !std::isfinite(w->nm)) {
            throw InvalidParameter("wavelength_nm", "must be positive and finite");
        }
    } else if (const auto* a = std::get_if<AngularFrequency>(&carrier)) {
        if (!std::isfinite(a->rad_per_ps)) {
            throw InvalidParameter("omega_rad_per_ps", "must be finite");
        }
    } else if (!std::isfinite(std::get<DirectPhase>(carrier).rad)) {
        throw InvalidParameter("phase_rad", "must be finite");
    }
}

//---------------------------------------------------------------------------//
// Emitter
//---------------------------------------------------------------------------//

struct EmitterParams {
    double t1_vac_ps = 1000.0;   ///< radiative lifetime without cavity
    double t2_star_ps = 300.0;   ///< pure dephasing time; +inf means no dephasing
    double purcell_factor = 1.0; ///< spontaneous emission enhancement, >= 1
    CarrierSpec carrier = DirectPhase{0.0};
};

struct DerivedRates {
    double gamma_prime; ///< radiative decay rate, Purcell-scaled
    double gamma;       ///< pure dephasing rate
    double t1;
    double t2;
    double indistinguishability; ///< T2 / (2 T1)
};

inline void check_emitter(const EmitterParams& e) {
    if (!(e.t1_vac_ps > 0.0) || !std::isfinite(e.t1_vac_ps)) {
        throw InvalidParameter("t1_vac_ps", "radiative lifetime must be positive and finite");
    }
    if (!(e.t2_star_ps > 0.0)) {
        throw InvalidParameter("t2_star_ps", "pure dephasing time must be positive");
    }
    if (!(e.purcell_factor >= 1.0) || !std::isfinite(e.purcell_factor)) {
        throw InvalidParameter("purcell_factor", "must be finite and >= 1");
    }
    check_carrier(e.carrier);
}

/// Purcell enhancement scales the decay rate only; dephasing is untouched.
inline DerivedRates derive_rates(const EmitterParams& e) {
    check_emitter(e);
    DerivedRates r{};
    r.gamma_prime = e.purcell_factor / e.t1_vac_ps;
    r.gamma = 1.0 / e.t2_star_ps;
    r.t1 = 1.0 / r.gamma_prime;
    r.t2 = 1.0 / (r.gamma + 0.5 * r.gamma_prime);
    // Gamma'/(2 Gamma + Gamma') rather than t2 * gamma_prime / 2 so that
    // the Gamma = 0 limit is exactly 1.
    r.indistinguishability = r.gamma_prime / (2.0 * r.gamma + r.gamma_prime);
    return r;
}

//---------------------------------------------------------------------------//
// Optics
//---------------------------------------------------------------------------//

/// Unbalanced Mach-Zehnder: short arm tau, long arm tau + d_tau.
struct Interferometer {
    double tau_ps = 0.0;
    double d_tau_ps = 12500.0;
    double r = 0.5;
    double t = 0.5;
};

struct OpticsConfig {
    double r_bs = 0.5;
    double t_bs = 0.5;
    Interferometer interf1{};
    Interferometer interf2{};
    double emission_delay_ps = 12500.0; ///< T, separation of the two emissions
    double jitter_ps = 0.0;             ///< |dT|
};

namespace detail {

inline void check_split(const std::string& name, double r, double t) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw InvalidParameter("r_" + name, "must lie in [0, 1]");
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw InvalidParameter("t_" + name, "must lie in [0, 1]");
    }
    if (r + t > 1.0 + 1e-12) {
        throw InvalidParameter("r_" + name, "r + t exceeds 1");
    }
}

} // namespace detail

inline void check_optics(const OpticsConfig& c) {
    detail::check_split("bs", c.r_bs, c.t_bs);
    detail::check_split("if1", c.interf1.r, c.interf1.t);
    detail::check_split("if2", c.interf2.r, c.interf2.t);
    if (!(c.interf1.d_tau_ps >= 0.0) || !std::isfinite(c.interf1.d_tau_ps)) {
        throw InvalidParameter("dtau1_ps", "arm imbalance must be finite and >= 0");
    }
    if (!(c.interf2.d_tau_ps >= 0.0) || !std::isfinite(c.interf2.d_tau_ps)) {
        throw InvalidParameter("dtau2_ps", "arm imbalance must be finite and >= 0");
    }
    if (!std::isfinite(c.interf1.tau_ps) || !std::isfinite(c.interf2.tau_ps)) {
        throw InvalidParameter("tau_ps", "short-arm delay must be finite");
    }
    if (!(c.emission_delay_ps > 0.0) || !std::isfinite(c.emission_delay_ps)) {
        throw InvalidParameter("delay_T_ps", "emission delay must be positive and finite");
    }
    if (!(c.jitter_ps >= 0.0) || !std::isfinite(c.jitter_ps)) {
        throw InvalidParameter("jitter_ps", "must be finite and >= 0");
    }
}

/// Soft checks on the regime in which the two-photon model is meaningful.
/// Hard range violations are reported by check_optics instead.
inline std::vector<std::string> validate_config(const OpticsConfig& c, const DerivedRates& rates) {
    std::vector<std::string> warnings;
    if (c.emission_delay_ps < 5.0 * rates.t1) {
        warnings.push_back("emission delay T is shorter than 5*T1; photons overlap and the model is invalid");
    }
    auto lossy = [&](const char* name, double r, double t) {
        if (r + t < 1.0 - 1e-12) {
            warnings.push_back(std::string("lossy element: ") + name + " has r + t < 1");
        }
    };
    lossy("beamsplitter", c.r_bs, c.t_bs);
    lossy("interferometer 1", c.interf1.r, c.interf1.t);
    lossy("interferometer 2", c.interf2.r, c.interf2.t);
    auto mismatch = [&](const char* name, double d_tau) {
        if (std::abs(d_tau - c.emission_delay_ps) > 10.0 * rates.t1) {
            warnings.push_back(std::string(name) + " arm imbalance differs from T by more than 10*T1; coincidences vanish");
        }
    };
    mismatch("interferometer 1", c.interf1.d_tau_ps);
    mismatch("interferometer 2", c.interf2.d_tau_ps);
    return warnings;
}

/// Interferometers with both arm imbalances equal to the emission delay.
inline OpticsConfig balanced_optics(double emission_delay_ps) {
    OpticsConfig c;
    c.emission_delay_ps = emission_delay_ps;
    c.interf1.d_tau_ps = emission_delay_ps;
    c.interf2.d_tau_ps = emission_delay_ps;
    return c;
}

} // namespace timebin
