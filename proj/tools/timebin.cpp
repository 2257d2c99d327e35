// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
//
// timebin: visibility calculator, sweep generator and oracle runner for
// time-bin entangled photon pairs from a dephasing single-photon source.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"
#endif

#include "timebin/cli.hpp"

namespace {

using timebin::cli::ExitCode;

struct Overrides {
    std::vector<std::pair<std::string, std::string>> values;
    std::string config_path;
    bool json = false;
};

/// Physical, carrier and oracle flags shared by every leaf command.
void add_parameter_flags(CLI::App* cmd, Overrides& ov) {
    auto add = [&](const std::string& names, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            names, [&ov, key](const std::string& v) { ov.values.emplace_back(key, v); }, help);
    };
    cmd->add_option("--config", ov.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_flag("--json", ov.json, "machine-readable output");
    add("--t1vac-ps,--t1vac", "t1_vac_ps", "radiative lifetime without cavity [ps]");
    add("--t1vac-ns", "t1_vac_ns", "radiative lifetime without cavity [ns]");
    add("--t2star-ps,--t2star", "t2_star_ps", "pure dephasing time [ps] (inf for none)");
    add("--t2star-ns", "t2_star_ns", "pure dephasing time [ns]");
    add("--purcell", "purcell", "Purcell factor F >= 1");
    add("--delay-T-ps,--delay-T", "delay_T_ps", "delay T between the two emissions [ps]");
    add("--delay-T-ns", "delay_T_ns", "delay T between the two emissions [ns]");
    add("--dtau1-ps,--dtau1", "dtau1_ps", "arm imbalance of interferometer 1 [ps] (default T)");
    add("--dtau2-ps,--dtau2", "dtau2_ps", "arm imbalance of interferometer 2 [ps] (default T)");
    add("--tau1-ps", "tau1_ps", "short-arm delay of interferometer 1 [ps]");
    add("--tau2-ps", "tau2_ps", "short-arm delay of interferometer 2 [ps]");
    add("--rbs", "r_bs", "beamsplitter intensity reflection");
    add("--tbs", "t_bs", "beamsplitter intensity transmission");
    add("--rif1", "r_if1", "interferometer 1 reflection");
    add("--tif1", "t_if1", "interferometer 1 transmission");
    add("--rif2", "r_if2", "interferometer 2 reflection");
    add("--tif2", "t_if2", "interferometer 2 transmission");
    add("--phase-rad,--phase", "phase_rad", "interferometer phase difference [rad]");
    add("--wavelength-nm,--wavelength", "wavelength_nm", "photon wavelength [nm]");
    add("--omega-rad-per-ps", "omega_rad_per_ps", "carrier angular frequency [rad/ps]");
    add("--jitter-ps,--jitter", "jitter_ps", "emission-delay jitter |dT| [ps]");
    add("--samples", "samples", "Monte Carlo sample count");
    add("--seed", "seed", "64-bit seed");
    add("--grid-divisor", "grid_divisor", "grid step = min(T1, T2*) / divisor");
    add("--span-t1", "span_t1", "integration span in units of T1");
}

timebin::RunConfig load(const Overrides& ov) {
    timebin::Settings settings;
    if (!ov.config_path.empty()) {
        std::ifstream in(ov.config_path);
        if (!in) {
            throw timebin::InvalidParameter("config", "cannot read '" + ov.config_path + "'");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        timebin::parse_config_text(settings, buffer.str());
    }
    for (const auto& [key, value] : ov.values) {
        timebin::set_setting(settings, key, value);
    }
    return timebin::build_run_config(settings);
}

struct AxisFlags {
    std::optional<double> min, max, min2, max2;
    std::optional<std::size_t> steps, steps2;

    std::vector<timebin::Axis> resolve(timebin::SweepKind kind) const {
        auto axes = timebin::default_axes(kind);
        if (min) axes[0].min = *min;
        if (max) axes[0].max = *max;
        if (steps) axes[0].n_steps = *steps;
        if (axes.size() > 1) {
            if (min2) axes[1].min = *min2;
            if (max2) axes[1].max = *max2;
            if (steps2) axes[1].n_steps = *steps2;
        }
        return axes;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-bin entanglement of sequential single photons: visibility, sweeps, oracles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", timebin::kVersion);

    Overrides ov;
    std::string out_path;
    std::string meta_path;
    AxisFlags axis;
    double target = timebin::kChshVisibility;

    auto* visibility = app.add_subcommand("visibility", "fringe visibility and coincidence probabilities");
    add_parameter_flags(visibility, ov);

    auto* sweep = app.add_subcommand("sweep", "write a visibility sweep as CSV");
    sweep->require_subcommand(1);
    std::vector<std::pair<CLI::App*, timebin::SweepKind>> sweep_kinds;
    for (auto kind : {timebin::SweepKind::purcell, timebin::SweepKind::delay, timebin::SweepKind::map2d,
                      timebin::SweepKind::jitter}) {
        auto* sub = sweep->add_subcommand(timebin::to_string(kind));
        add_parameter_flags(sub, ov);
        sub->add_option("--out", out_path, "CSV output path (stdout when omitted)");
        sub->add_option("--meta", meta_path, "JSON metadata sidecar path");
        sub->add_option("--min", axis.min, "axis minimum");
        sub->add_option("--max", axis.max, "axis maximum");
        sub->add_option("--steps", axis.steps, "axis point count");
        if (kind == timebin::SweepKind::map2d) {
            sub->add_option("--min2", axis.min2, "second axis minimum");
            sub->add_option("--max2", axis.max2, "second axis maximum");
            sub->add_option("--steps2", axis.steps2, "second axis point count");
        }
        sweep_kinds.emplace_back(sub, kind);
    }

    auto* validate = app.add_subcommand("validate", "cross-check the closed form with numerical oracles");
    validate->require_subcommand(1);
    std::vector<std::pair<CLI::App*, timebin::cli::ValidateMode>> validate_modes;
    for (auto [name, mode] : {std::pair{"mc", timebin::cli::ValidateMode::mc},
                              std::pair{"quadrature", timebin::cli::ValidateMode::quadrature},
                              std::pair{"correlator", timebin::cli::ValidateMode::correlator}}) {
        auto* sub = validate->add_subcommand(name);
        add_parameter_flags(sub, ov);
        validate_modes.emplace_back(sub, mode);
    }

    auto* threshold = app.add_subcommand("threshold", "Purcell factor and delay window for a target visibility");
    add_parameter_flags(threshold, ov);
    threshold->add_option("--target", target, "target visibility (default 1/sqrt(2))");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitCode::kOk : ExitCode::kBadInput;
    }

    try {
        const auto cfg = load(ov);
        if (*visibility) {
            return timebin::cli::cmd_visibility(cfg, ov.json, std::cout);
        }
        for (const auto& [sub, kind] : sweep_kinds) {
            if (*sub) {
                return timebin::cli::cmd_sweep(kind, cfg, axis.resolve(kind), out_path, meta_path, std::cout,
                                               std::cerr);
            }
        }
        for (const auto& [sub, mode] : validate_modes) {
            if (*sub) {
                return timebin::cli::cmd_validate(mode, cfg, ov.json, std::cout);
            }
        }
        if (*threshold) {
            return timebin::cli::cmd_threshold(cfg, target, ov.json, std::cout, std::cerr);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ExitCode::kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ExitCode::kCheckFailed;
    }
    return ExitCode::kBadInput;
}
