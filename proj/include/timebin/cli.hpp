// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand bodies for the `timebin` executable. Each command writes its
// report to a stream and returns the process exit code; argument parsing
// lives in tools/timebin.cpp.
#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "timebin/analytic.hpp"
#include "timebin/core_model.hpp"
#include "timebin/run_config.hpp"
#include "timebin/stochastic_oracle.hpp"
#include "timebin/sweeps.hpp"
#include "timebin/version.hpp"

namespace timebin::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kBadInput = 2, kIoError = 3 };

enum class ValidateMode { mc, quadrature, correlator };

/// Pass thresholds for `validate`.
inline constexpr double kMaxAbsZ = 4.0;
inline constexpr double kMaxQuadratureRelError = 1e-4;
inline constexpr double kMaxDecayRateRelError = 0.02;

using Json = nlohmann::ordered_json;

inline std::string sig9(double v) { return fmt::format("{:.9g}", v); }

//---------------------------------------------------------------------------//
// visibility
//---------------------------------------------------------------------------//

inline int cmd_visibility(const RunConfig& cfg, bool json, std::ostream& out) {
    const auto rates = derive_rates(cfg.emitter);
    const auto vis = visibility(rates, cfg.optics);
    const auto here = coincidence_probability(rates, cfg.optics, cfg.emitter.carrier);
    const double p0 = coincidence_probability(rates, cfg.optics, 0.0).p12;
    const double p_half = coincidence_probability(rates, cfg.optics, 0.5 * std::numbers::pi).p12;
    const double p_pi = coincidence_probability(rates, cfg.optics, std::numbers::pi).p12;
    const auto warnings = validate_config(cfg.optics, rates);

    if (json) {
        Json j;
        j["visibility"] = vis.v;
        j["envelope_prefactor"] = vis.envelope_prefactor;
        j["bracket"] = vis.bracket;
        j["max_visibility"] = max_visibility(rates);
        j["t1_ps"] = rates.t1;
        j["t2_ps"] = rates.t2;
        j["phase_rad"] = here.phase;
        j["p12_at_phase"] = here.p12;
        j["p12_phase_0"] = p0;
        j["p12_phase_half_pi"] = p_half;
        j["p12_phase_pi"] = p_pi;
        j["warnings"] = warnings;
        out << j.dump(2) << '\n';
        return kOk;
    }
    fmt::print(out, "visibility          {}\n", sig9(vis.v));
    fmt::print(out, "envelope_prefactor  {}\n", sig9(vis.envelope_prefactor));
    fmt::print(out, "bracket             {}\n", sig9(vis.bracket));
    fmt::print(out, "max_visibility      {}\n", sig9(max_visibility(rates)));
    fmt::print(out, "t1_ps               {}\n", sig9(rates.t1));
    fmt::print(out, "t2_ps               {}\n", sig9(rates.t2));
    fmt::print(out, "{:<20}{}\n", fmt::format("p12({})", sig9(here.phase)), sig9(here.p12));
    fmt::print(out, "p12(0)              {}\n", sig9(p0));
    fmt::print(out, "p12(pi/2)           {}\n", sig9(p_half));
    fmt::print(out, "p12(pi)             {}\n", sig9(p_pi));
    for (const auto& w : warnings) {
        fmt::print(out, "warning: {}\n", w);
    }
    return kOk;
}

//---------------------------------------------------------------------------//
// sweep
//---------------------------------------------------------------------------//

inline std::vector<std::string> csv_columns(SweepKind kind) {
    switch (kind) {
    case SweepKind::purcell:
        return {"purcell_factor", "visibility", "threshold"};
    case SweepKind::delay:
        return {"delta_ps", "visibility", "threshold"};
    case SweepKind::map2d:
        return {"t_minus_dtau1_ps", "t_minus_dtau2_ps", "visibility"};
    case SweepKind::jitter:
        return {"jitter_ps", "visibility"};
    }
    return {};
}

/// Comma separated, header row, LF endings, 9 significant digits.
inline void write_csv(const SweepResult& result, std::ostream& out) {
    const auto columns = csv_columns(result.kind);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << columns[i];
    }
    out << '\n';
    const bool with_threshold = result.kind == SweepKind::purcell || result.kind == SweepKind::delay;
    for (const auto& rec : result.records) {
        for (double a : rec.axis_values) {
            out << sig9(a) << ',';
        }
        out << sig9(rec.v);
        if (with_threshold) {
            out << ',' << sig9(result.threshold_line);
        }
        out << '\n';
    }
}

inline Json sweep_metadata(const SweepResult& result) {
    Json meta;
    meta["tool"] = "timebin";
    meta["version"] = kVersion;
    for (const auto& [key, value] : result.metadata) {
        meta[key] = value;
    }
    meta["records"] = result.records.size();
    return meta;
}

/// Writes the CSV to `out_path`, or to `out` when the path is empty.
/// Metadata goes to `meta_path` when given.
inline int cmd_sweep(SweepKind kind, const RunConfig& cfg, const std::vector<Axis>& axes,
                     const std::string& out_path, const std::string& meta_path, std::ostream& out,
                     std::ostream& err) {
    SweepSpec spec = make_sweep_spec(kind, cfg.emitter, cfg.optics);
    if (!axes.empty()) {
        spec.axes = axes;
    }
    const auto result = run_sweep(spec);
    if (out_path.empty()) {
        write_csv(result, out);
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            fmt::print(err, "error: cannot open '{}' for writing\n", out_path);
            return kIoError;
        }
        write_csv(result, file);
        file.flush();
        if (!file) {
            fmt::print(err, "error: failed writing '{}'\n", out_path);
            return kIoError;
        }
    }
    if (!meta_path.empty()) {
        std::ofstream file(meta_path, std::ios::binary);
        if (!file) {
            fmt::print(err, "error: cannot open '{}' for writing\n", meta_path);
            return kIoError;
        }
        file << sweep_metadata(result).dump(2) << '\n';
        if (!file) {
            return kIoError;
        }
    }
    return kOk;
}

//---------------------------------------------------------------------------//
// validate
//---------------------------------------------------------------------------//

inline Json report_json(const OracleReport& r) {
    Json j;
    j["estimate"] = r.estimate;
    j["std_error"] = r.std_error;
    j["closed_form"] = r.closed_form;
    j["z_score"] = r.z_score;
    j["n_samples"] = r.n_samples;
    return j;
}

inline void print_report(std::ostream& out, const OracleReport& r) {
    fmt::print(out, "estimate     {}\n", sig9(r.estimate));
    fmt::print(out, "std_error    {}\n", sig9(r.std_error));
    fmt::print(out, "closed_form  {}\n", sig9(r.closed_form));
    fmt::print(out, "z_score      {}\n", sig9(r.z_score));
    fmt::print(out, "n_samples    {}\n", r.n_samples);
}

/// Relative error of a p12 estimate. Falls back to the fringe mean level
/// when the closed form is a perfect dark fringe.
inline double p12_relative_error(double estimate, double closed, double prefactor) {
    const double scale = std::abs(closed) > 1e-12 * prefactor ? std::abs(closed) : prefactor;
    return std::abs(estimate - closed) / scale;
}

inline int cmd_validate(ValidateMode mode, const RunConfig& cfg, bool json, std::ostream& out) {
    const auto rates = derive_rates(cfg.emitter);
    const auto& optics = cfg.optics;
    const double delta = optics.interf1.d_tau_ps - optics.interf2.d_tau_ps;
    const double phase = carrier_phase(cfg.emitter.carrier, delta);

    switch (mode) {
    case ValidateMode::quadrature: {
        const auto grid = default_grid(rates, cfg.oracle.grid_divisor, cfg.oracle.span_t1);
        const auto refined = TimeGrid{grid.t_min, grid.t_max, 2 * grid.n_points - 1};
        const double q = quadrature_coincidence(rates, optics, phase, grid);
        const double q_fine = quadrature_coincidence(rates, optics, phase, refined);
        const double closed = coincidence_probability(rates, optics, phase).p12;
        const double pre = coincidence_prefactor(optics);
        const double rel = p12_relative_error(q, closed, pre);
        const double refine_change = p12_relative_error(q, q_fine, pre);
        const bool pass = rel < kMaxQuadratureRelError;
        if (json) {
            Json j;
            j["mode"] = "quadrature";
            j["estimate"] = q;
            j["closed_form"] = closed;
            j["relative_error"] = rel;
            j["refined_estimate"] = q_fine;
            j["refinement_change"] = refine_change;
            j["grid_points"] = grid.n_points;
            j["pass"] = pass;
            out << j.dump(2) << '\n';
        } else {
            fmt::print(out, "estimate           {}\n", sig9(q));
            fmt::print(out, "closed_form        {}\n", sig9(closed));
            fmt::print(out, "relative_error     {}\n", sig9(rel));
            fmt::print(out, "refined_estimate   {}\n", sig9(q_fine));
            fmt::print(out, "refinement_change  {}\n", sig9(refine_change));
            fmt::print(out, "grid_points        {}\n", grid.n_points);
            fmt::print(out, "{}\n", pass ? "PASS" : "FAIL");
        }
        return pass ? kOk : kCheckFailed;
    }
    case ValidateMode::mc: {
        const auto grid = default_grid(rates, cfg.oracle.grid_divisor, cfg.oracle.span_t1);
        const auto report = mc_coincidence(rates, optics, phase, grid, cfg.oracle.samples, cfg.oracle.seed);
        const bool pass = std::abs(report.z_score) < kMaxAbsZ;
        if (json) {
            Json j;
            j["mode"] = "mc";
            j["seed"] = cfg.oracle.seed;
            j["report"] = report_json(report);
            j["pass"] = pass;
            out << j.dump(2) << '\n';
        } else {
            fmt::print(out, "seed         {}\n", cfg.oracle.seed);
            print_report(out, report);
            fmt::print(out, "{}\n", pass ? "PASS" : "FAIL");
        }
        return pass ? kOk : kCheckFailed;
    }
    case ValidateMode::correlator: {
        if (!(rates.gamma > 0.0)) {
            throw InvalidParameter("t2_star_ps", "correlator check needs a finite pure dephasing time");
        }
        const auto lags = default_correlator_lags(rates.gamma);
        const auto reports = correlator_check(rates.gamma, lags, cfg.oracle.samples, cfg.oracle.seed);
        const double fitted = fit_decay_rate(lags, reports);
        const double rate_error = std::abs(fitted / rates.gamma - 1.0);
        bool pass = rate_error < kMaxDecayRateRelError;
        for (const auto& r : reports) {
            pass = pass && std::abs(r.z_score) < kMaxAbsZ;
        }
        if (json) {
            Json j;
            j["mode"] = "correlator";
            j["seed"] = cfg.oracle.seed;
            j["gamma_per_ps"] = rates.gamma;
            j["fitted_gamma_per_ps"] = fitted;
            j["rate_relative_error"] = rate_error;
            Json arr = Json::array();
            for (std::size_t i = 0; i < lags.size(); ++i) {
                Json r = report_json(reports[i]);
                r["lag_ps"] = lags[i];
                arr.push_back(r);
            }
            j["lags"] = arr;
            j["pass"] = pass;
            out << j.dump(2) << '\n';
        } else {
            fmt::print(out, "seed         {}\n", cfg.oracle.seed);
            fmt::print(out, "{:>12} {:>14} {:>14} {:>14} {:>10}\n", "lag_ps", "estimate", "std_error",
                       "closed_form", "z_score");
            for (std::size_t i = 0; i < lags.size(); ++i) {
                const auto& r = reports[i];
                fmt::print(out, "{:>12} {:>14} {:>14} {:>14} {:>10}\n", sig9(lags[i]), sig9(r.estimate),
                           sig9(r.std_error), sig9(r.closed_form), fmt::format("{:.3f}", r.z_score));
            }
            fmt::print(out, "gamma        {}\n", sig9(rates.gamma));
            fmt::print(out, "fitted_gamma {}\n", sig9(fitted));
            fmt::print(out, "rate_error   {}\n", sig9(rate_error));
            fmt::print(out, "{}\n", pass ? "PASS" : "FAIL");
        }
        return pass ? kOk : kCheckFailed;
    }
    }
    return kBadInput;
}

//---------------------------------------------------------------------------//
// threshold
//---------------------------------------------------------------------------//

inline int cmd_threshold(const RunConfig& cfg, double target, bool json, std::ostream& out, std::ostream& err) {
    double purcell_star = 0.0;
    try {
        purcell_star = chsh_threshold_purcell(cfg.emitter, target);
    } catch (const TargetUnreachable& e) {
        fmt::print(err, "threshold unreachable: {}\n", e.what());
        return kCheckFailed;
    }
    std::optional<double> wavelength = cfg.wavelength_nm;
    if (!wavelength) {
        if (const auto* w = std::get_if<Wavelength>(&cfg.emitter.carrier)) {
            wavelength = w->nm;
        }
    }
    std::optional<DelayWindow> window;
    if (wavelength) {
        window = delay_tolerance_window(derive_rates(cfg.emitter), cfg.optics, *wavelength, target);
    }

    if (json) {
        Json j;
        j["target"] = target;
        j["purcell_threshold"] = purcell_star;
        j["purcell_factor"] = cfg.emitter.purcell_factor;
        j["wavelength_nm"] = wavelength ? Json(*wavelength) : Json(nullptr);
        Json w = nullptr;
        if (window) {
            w = Json::object();
            w["delta_ps"] = window->delta_ps;
            w["delta_mm"] = window->delta_mm;
            w["delta_wavelengths"] = window->delta_wavelengths;
        }
        j["delay_window"] = w;
        out << j.dump(2) << '\n';
        return kOk;
    }
    fmt::print(out, "target              {}\n", sig9(target));
    fmt::print(out, "purcell_threshold   {}\n", sig9(purcell_star));
    if (wavelength) {
        if (window) {
            fmt::print(out, "delay_window_ps     +/- {}\n", sig9(window->delta_ps));
            fmt::print(out, "delay_window_mm     +/- {}\n", sig9(window->delta_mm));
            fmt::print(out, "delay_window_lambda +/- {}\n", sig9(window->delta_wavelengths));
        } else {
            fmt::print(out, "delay_window        empty (max visibility at F={} does not exceed target)\n",
                       sig9(cfg.emitter.purcell_factor));
        }
    }
    return kOk;
}

} // namespace timebin::cli
