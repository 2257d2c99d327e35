// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Flat key-value run configuration:
//
//     # bare quantum dot
//     t1_vac_ps  = 1000
//     t2_star_ns = 0.3
//     purcell    = 1
//
// Times take a _ps or _ns suffix. Unknown keys are rejected. Later
// assignments (including command-line overrides) replace earlier ones,
// whichever unit suffix they use.
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "timebin/core_model.hpp"
#include "timebin/errors.hpp"

namespace timebin {

struct OracleSettings {
    std::size_t samples = 20000;
    std::uint64_t seed = 1;
    double grid_divisor = 40.0; ///< step = min(T1, T2*) / grid_divisor
    double span_t1 = 25.0;      ///< integration span in units of T1
};

struct RunConfig {
    EmitterParams emitter{};
    OpticsConfig optics{};
    std::optional<double> wavelength_nm;
    OracleSettings oracle{};
};

/// Canonical key (time keys without unit suffix) -> raw value text.
using Settings = std::map<std::string, std::string>;

namespace detail {

inline constexpr std::string_view kTimeKeys[] = {"t1_vac", "t2_star", "delay_T", "dtau1",
                                                 "dtau2",  "tau1",    "tau2",    "jitter"};
inline constexpr std::string_view kPlainKeys[] = {"purcell",       "r_bs",          "t_bs",    "r_if1",
                                                  "t_if1",         "r_if2",         "t_if2",   "phase_rad",
                                                  "wavelength_nm", "omega_rad_per_ps", "samples", "seed",
                                                  "grid_divisor",  "span_t1"};

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidParameter(key, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

inline std::uint64_t parse_u64(const std::string& key, std::string_view text) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidParameter(key, "not an unsigned integer: '" + std::string(text) + "'");
    }
    return value;
}

} // namespace detail

/// Stores `key = value` under its canonical name; `*_ns` times are
/// converted to ps text on the fly.
inline void set_setting(Settings& settings, std::string_view key, std::string_view value) {
    const std::string k(detail::trim(key));
    const std::string v(detail::trim(value));
    if (v.empty()) {
        throw InvalidParameter(k, "missing value");
    }
    for (auto base : detail::kTimeKeys) {
        if (k == std::string(base) + "_ps") {
            settings[std::string(base)] = v;
            return;
        }
        if (k == std::string(base) + "_ns") {
            const double ns = detail::parse_double(k, v);
            char buf[64];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, ns * 1000.0);
            settings[std::string(base)] = std::string(buf, ptr);
            return;
        }
    }
    for (auto plain : detail::kPlainKeys) {
        if (k == plain) {
            settings[k] = v;
            return;
        }
    }
    throw InvalidParameter(k, "unknown configuration key");
}

inline void parse_config_text(Settings& settings, std::string_view text) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidParameter("line " + std::to_string(line_no), "expected 'key = value'");
        }
        set_setting(settings, line.substr(0, eq), line.substr(eq + 1));
    }
}

/// Builds and validates a RunConfig. Arm imbalances default to the
/// emission delay when not given.
inline RunConfig build_run_config(const Settings& settings) {
    RunConfig cfg;
    auto number = [&](const std::string& key) -> std::optional<double> {
        const auto it = settings.find(key);
        if (it == settings.end()) {
            return std::nullopt;
        }
        return detail::parse_double(key, it->second);
    };
    auto assign = [&](const std::string& key, double& field) {
        if (auto v = number(key)) {
            field = *v;
        }
    };
    assign("t1_vac", cfg.emitter.t1_vac_ps);
    assign("t2_star", cfg.emitter.t2_star_ps);
    assign("purcell", cfg.emitter.purcell_factor);
    assign("delay_T", cfg.optics.emission_delay_ps);
    cfg.optics.interf1.d_tau_ps = number("dtau1").value_or(cfg.optics.emission_delay_ps);
    cfg.optics.interf2.d_tau_ps = number("dtau2").value_or(cfg.optics.emission_delay_ps);
    assign("tau1", cfg.optics.interf1.tau_ps);
    assign("tau2", cfg.optics.interf2.tau_ps);
    assign("jitter", cfg.optics.jitter_ps);
    assign("r_bs", cfg.optics.r_bs);
    assign("t_bs", cfg.optics.t_bs);
    assign("r_if1", cfg.optics.interf1.r);
    assign("t_if1", cfg.optics.interf1.t);
    assign("r_if2", cfg.optics.interf2.r);
    assign("t_if2", cfg.optics.interf2.t);

    const auto phase = number("phase_rad");
    const auto omega = number("omega_rad_per_ps");
    cfg.wavelength_nm = number("wavelength_nm");
    if (phase && omega) {
        throw InvalidParameter("phase_rad", "give at most one of phase_rad and omega_rad_per_ps");
    }
    if (phase) {
        cfg.emitter.carrier = DirectPhase{*phase};
    } else if (omega) {
        cfg.emitter.carrier = AngularFrequency{*omega};
    } else if (cfg.wavelength_nm) {
        cfg.emitter.carrier = Wavelength{*cfg.wavelength_nm};
    }
    if (cfg.wavelength_nm && !(*cfg.wavelength_nm > 0.0)) {
        throw InvalidParameter("wavelength_nm", "must be positive");
    }

    if (const auto it = settings.find("samples"); it != settings.end()) {
        cfg.oracle.samples = detail::parse_u64("samples", it->second);
    }
    if (const auto it = settings.find("seed"); it != settings.end()) {
        cfg.oracle.seed = detail::parse_u64("seed", it->second);
    }
    assign("grid_divisor", cfg.oracle.grid_divisor);
    assign("span_t1", cfg.oracle.span_t1);
    if (!(cfg.oracle.grid_divisor > 0.0)) {
        throw InvalidParameter("grid_divisor", "must be positive");
    }
    if (!(cfg.oracle.span_t1 > 0.0)) {
        throw InvalidParameter("span_t1", "must be positive");
    }

    check_emitter(cfg.emitter);
    check_optics(cfg.optics);
    return cfg;
}

} // namespace timebin
