// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Parameter sweeps producing plot-ready visibility tables: visibility
// against Purcell factor, against interferometer mismatch, over the 2-D
// mismatch plane, and against emission-delay jitter.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "timebin/analytic.hpp"
#include "timebin/core_model.hpp"
#include "timebin/errors.hpp"

namespace timebin {

enum class SweepKind { purcell, delay, map2d, jitter };

inline const char* to_string(SweepKind kind) {
    switch (kind) {
    case SweepKind::purcell:
        return "purcell";
    case SweepKind::delay:
        return "delay";
    case SweepKind::map2d:
        return "map2d";
    case SweepKind::jitter:
        return "jitter";
    }
    return "?";
}

struct Axis {
    double min;
    double max;
    std::size_t n_steps;

    double at(std::size_t k) const {
        return min + static_cast<double>(k) * (max - min) / static_cast<double>(n_steps - 1);
    }
};

struct SweepSpec {
    SweepKind kind = SweepKind::purcell;
    EmitterParams emitter{};
    OpticsConfig optics{};
    std::vector<Axis> axes; ///< one axis, two for map2d
    double threshold_line = kChshVisibility;
};

struct SweepRecord {
    std::vector<double> axis_values;
    double v;
    double p12_min;
    double p12_max;
};

struct SweepResult {
    SweepKind kind;
    std::vector<SweepRecord> records;
    double threshold_line;
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// Defaults bracketing every quoted crossing: F in [1, 200] at unit steps,
/// delta in [-30, 30] ps at 0.1 ps, the mismatch plane [-20, 20]^2 ps at
/// 0.2 ps, jitter [0, 2] ps at 0.01 ps.
inline std::vector<Axis> default_axes(SweepKind kind) {
    switch (kind) {
    case SweepKind::purcell:
        return {{1.0, 200.0, 200}};
    case SweepKind::delay:
        return {{-30.0, 30.0, 601}};
    case SweepKind::map2d:
        return {{-20.0, 20.0, 201}, {-20.0, 20.0, 201}};
    case SweepKind::jitter:
        return {{0.0, 2.0, 201}};
    }
    return {};
}

inline SweepSpec make_sweep_spec(SweepKind kind, const EmitterParams& emitter, const OpticsConfig& optics) {
    return SweepSpec{kind, emitter, optics, default_axes(kind), kChshVisibility};
}

namespace detail {

inline void check_axes(const SweepSpec& spec) {
    const std::size_t expected = spec.kind == SweepKind::map2d ? 2 : 1;
    if (spec.axes.size() != expected) {
        throw InvalidParameter("axes", std::string(to_string(spec.kind)) + " sweep needs " +
                                           std::to_string(expected) + " axis range(s)");
    }
    for (const auto& a : spec.axes) {
        if (a.n_steps < 2) {
            throw InvalidParameter("steps", "need at least 2 steps");
        }
        if (!(a.min < a.max)) {
            throw InvalidParameter("min", "axis min must be below max");
        }
    }
}

inline void check_kind(const SweepSpec& spec, SweepKind kind) {
    if (spec.kind != kind) {
        throw InvalidParameter("kind", std::string("expected a ") + to_string(kind) + " sweep");
    }
    detail::check_axes(spec);
    check_emitter(spec.emitter);
    check_optics(spec.optics);
}

inline SweepRecord record_for(std::vector<double> axis_values, double v, const OpticsConfig& optics) {
    const double pre = coincidence_prefactor(optics);
    return {std::move(axis_values), v, pre * (1.0 - v), pre * (1.0 + v)};
}

inline SweepResult start_result(const SweepSpec& spec) {
    SweepResult result{spec.kind, {}, spec.threshold_line, {}};
    const auto& e = spec.emitter;
    const auto& o = spec.optics;
    auto put = [&](std::string key, double value) { result.metadata.emplace_back(std::move(key), std::to_string(value)); };
    result.metadata.emplace_back("kind", to_string(spec.kind));
    put("t1_vac_ps", e.t1_vac_ps);
    put("t2_star_ps", e.t2_star_ps);
    put("purcell", e.purcell_factor);
    put("delay_T_ps", o.emission_delay_ps);
    put("dtau1_ps", o.interf1.d_tau_ps);
    put("dtau2_ps", o.interf2.d_tau_ps);
    put("r_bs", o.r_bs);
    put("t_bs", o.t_bs);
    put("r_if1", o.interf1.r);
    put("t_if1", o.interf1.t);
    put("r_if2", o.interf2.r);
    put("t_if2", o.interf2.t);
    put("jitter_ps", o.jitter_ps);
    put("threshold", spec.threshold_line);
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
        const auto tag = "axis" + std::to_string(i);
        put(tag + "_min", spec.axes[i].min);
        put(tag + "_max", spec.axes[i].max);
        result.metadata.emplace_back(tag + "_steps", std::to_string(spec.axes[i].n_steps));
    }
    return result;
}

} // namespace detail

/// Balanced visibility against Purcell factor.
inline SweepResult sweep_purcell(const SweepSpec& spec) {
    detail::check_kind(spec, SweepKind::purcell);
    auto result = detail::start_result(spec);
    const auto& axis = spec.axes[0];
    OpticsConfig optics = spec.optics;
    optics.interf1.d_tau_ps = optics.interf2.d_tau_ps = optics.emission_delay_ps;
    EmitterParams emitter = spec.emitter;
    for (std::size_t k = 0; k < axis.n_steps; ++k) {
        emitter.purcell_factor = axis.at(k);
        const double v = max_visibility(derive_rates(emitter));
        result.records.push_back(detail::record_for({emitter.purcell_factor}, v, optics));
    }
    return result;
}

/// Visibility against delta = dtau1 - dtau2 with dtau1 pinned to T.
inline SweepResult sweep_delay(const SweepSpec& spec) {
    detail::check_kind(spec, SweepKind::delay);
    auto result = detail::start_result(spec);
    const auto rates = derive_rates(spec.emitter);
    const auto& axis = spec.axes[0];
    OpticsConfig optics = spec.optics;
    const double T = optics.emission_delay_ps;
    optics.interf1.d_tau_ps = T;
    for (std::size_t k = 0; k < axis.n_steps; ++k) {
        const double delta = axis.at(k);
        optics.interf2.d_tau_ps = T - delta;
        if (optics.interf2.d_tau_ps < 0.0) {
            throw InvalidParameter("delta", "dtau2 = T - delta would be negative");
        }
        result.records.push_back(detail::record_for({delta}, visibility(rates, optics).v, optics));
    }
    return result;
}

/// Visibility over (T - dtau1, T - dtau2), row-major in the first axis.
inline SweepResult sweep_map2d(const SweepSpec& spec) {
    detail::check_kind(spec, SweepKind::map2d);
    auto result = detail::start_result(spec);
    const auto rates = derive_rates(spec.emitter);
    const auto& ax = spec.axes[0];
    const auto& ay = spec.axes[1];
    OpticsConfig optics = spec.optics;
    const double T = optics.emission_delay_ps;
    result.records.reserve(ax.n_steps * ay.n_steps);
    for (std::size_t i = 0; i < ax.n_steps; ++i) {
        const double x = ax.at(i);
        for (std::size_t j = 0; j < ay.n_steps; ++j) {
            const double y = ay.at(j);
            optics.interf1.d_tau_ps = T - x;
            optics.interf2.d_tau_ps = T - y;
            if (optics.interf1.d_tau_ps < 0.0 || optics.interf2.d_tau_ps < 0.0) {
                throw InvalidParameter("map2d", "arm imbalance would be negative");
            }
            result.records.push_back(detail::record_for({x, y}, visibility(rates, optics).v, optics));
        }
    }
    return result;
}

/// First-order jitter model V (1 - Gamma' |dT|) at the balanced point.
inline SweepResult sweep_jitter(const SweepSpec& spec) {
    detail::check_kind(spec, SweepKind::jitter);
    auto result = detail::start_result(spec);
    const auto rates = derive_rates(spec.emitter);
    const auto& axis = spec.axes[0];
    OpticsConfig optics = spec.optics;
    optics.interf1.d_tau_ps = optics.interf2.d_tau_ps = optics.emission_delay_ps;
    const double v0 = max_visibility(rates);
    for (std::size_t k = 0; k < axis.n_steps; ++k) {
        const double jitter = axis.at(k);
        const double v = v0 * (1.0 - jitter_sensitivity(rates, jitter));
        result.records.push_back(detail::record_for({jitter}, v, optics));
    }
    return result;
}

inline SweepResult run_sweep(const SweepSpec& spec) {
    switch (spec.kind) {
    case SweepKind::purcell:
        return sweep_purcell(spec);
    case SweepKind::delay:
        return sweep_delay(spec);
    case SweepKind::map2d:
        return sweep_map2d(spec);
    case SweepKind::jitter:
        return sweep_jitter(spec);
    }
    throw InvalidParameter("kind", "unknown sweep kind");
}

} // namespace timebin
