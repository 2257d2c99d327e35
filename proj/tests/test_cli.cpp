// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "timebin/cli.hpp"

namespace tb = timebin;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

/// Runs the installed binary with stderr discarded.
Run run(const std::string& args) {
    const std::string cmd = std::string(TIMEBIN_EXE) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return {-1, {}};
    }
    std::string out;
    char buf[4096];
    while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) {
        out.append(buf, n);
    }
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::vector<double>> read_csv(const std::string& text, std::string* header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (header) {
        *header = line;
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(row);
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / ("timebin_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

double first_crossing(const std::vector<std::vector<double>>& rows, double level, double& lo, double& hi) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if ((rows[k - 1][1] - level) * (rows[k][1] - level) <= 0.0) {
            lo = rows[k - 1][0];
            hi = rows[k][0];
            return 1.0;
        }
    }
    return 0.0;
}

} // namespace

//---------------------------------------------------------------------------//
// Library-level commands
//---------------------------------------------------------------------------//

TEST(CliFunctions, VisibilityJsonKeyOrder) {
    tb::RunConfig cfg;
    std::ostringstream out;
    EXPECT_EQ(tb::cli::cmd_visibility(cfg, true, out), 0);
    const auto j = nlohmann::ordered_json::parse(out.str());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) {
        keys.push_back(k);
    }
    const std::vector<std::string> expected{"visibility",   "envelope_prefactor", "bracket",
                                            "max_visibility", "t1_ps",            "t2_ps",
                                            "phase_rad",    "p12_at_phase",       "p12_phase_0",
                                            "p12_phase_half_pi", "p12_phase_pi",  "warnings"};
    EXPECT_EQ(keys, expected);
    EXPECT_NEAR(j["visibility"].get<double>(), 3.0 / 23.0, 1e-15);
}

TEST(CliFunctions, CsvHeaders) {
    EXPECT_EQ(tb::cli::csv_columns(tb::SweepKind::purcell),
              (std::vector<std::string>{"purcell_factor", "visibility", "threshold"}));
    EXPECT_EQ(tb::cli::csv_columns(tb::SweepKind::delay),
              (std::vector<std::string>{"delta_ps", "visibility", "threshold"}));
    EXPECT_EQ(tb::cli::csv_columns(tb::SweepKind::map2d),
              (std::vector<std::string>{"t_minus_dtau1_ps", "t_minus_dtau2_ps", "visibility"}));
    EXPECT_EQ(tb::cli::csv_columns(tb::SweepKind::jitter), (std::vector<std::string>{"jitter_ps", "visibility"}));
}

TEST(CliFunctions, RelativeErrorAtDarkFringe) {
    EXPECT_DOUBLE_EQ(tb::cli::p12_relative_error(1.25, 1.0, 1.0), 0.25);
    EXPECT_DOUBLE_EQ(tb::cli::p12_relative_error(1e-6, 0.0, 1.0 / 32.0), 32e-6);
}

TEST(CliFunctions, UnwritablePathIsIoError) {
    tb::RunConfig cfg;
    std::ostringstream out, err;
    const int code = tb::cli::cmd_sweep(tb::SweepKind::jitter, cfg, tb::default_axes(tb::SweepKind::jitter),
                                        "/nonexistent-dir/x.csv", "", out, err);
    EXPECT_EQ(code, 3);
    EXPECT_FALSE(err.str().empty());
}

//---------------------------------------------------------------------------//
// Binary
//---------------------------------------------------------------------------//

TEST(CliBinary, VisibilityExamples) {
    auto r = run("visibility");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("visibility          0.130434783\n"), std::string::npos) << r.out;

    r = run("visibility --purcell 30");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.818181818"), std::string::npos) << r.out;

    r = run("visibility --t2star 1e12 --json");
    EXPECT_EQ(r.code, 0);
    EXPECT_NEAR(nlohmann::json::parse(r.out)["visibility"].get<double>(), 1.0, 1e-8);

    r = run("visibility --t2star-ns 0.3 --t1vac-ns 1 --json");
    EXPECT_NEAR(nlohmann::json::parse(r.out)["visibility"].get<double>(), 3.0 / 23.0, 1e-15);
}

TEST(CliBinary, JsonIsStableAcrossRuns) {
    const auto a = run("visibility --json --purcell 12 --dtau2-ps 12495");
    const auto b = run("visibility --json --purcell 12 --dtau2-ps 12495");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(CliBinary, BadInputExitCodes) {
    EXPECT_EQ(run("visibility --purcell 0.5").code, 2);
    EXPECT_EQ(run("visibility --purcell abc").code, 2);
    EXPECT_EQ(run("visibility --rbs 0.8 --tbs 0.8").code, 2);
    EXPECT_EQ(run("visibility --config /nonexistent.conf").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("sweep").code, 2);
    EXPECT_EQ(run("sweep purcell --steps 1").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(CliBinary, ConfigFileWithOverride) {
    const auto dir = scratch_dir();
    const auto conf = dir / "dot.conf";
    std::ofstream(conf) << "# dot in a cavity\nt2_star_ps = 300\npurcell = 30\n";
    auto r = run("visibility --json --config " + conf.string());
    EXPECT_NEAR(nlohmann::json::parse(r.out)["visibility"].get<double>(), 9.0 / 11.0, 1e-15);
    r = run("visibility --json --config " + conf.string() + " --purcell 1");
    EXPECT_NEAR(nlohmann::json::parse(r.out)["visibility"].get<double>(), 3.0 / 23.0, 1e-15);
    std::ofstream(conf) << "purcel = 30\n";
    EXPECT_EQ(run("visibility --config " + conf.string()).code, 2);
    fs::remove_all(dir);
}

TEST(CliBinary, PurcellSweepCrossing) {
    const auto r = run("sweep purcell --t2star 300");
    ASSERT_EQ(r.code, 0);
    std::string header;
    const auto rows = read_csv(r.out, &header);
    EXPECT_EQ(header, "purcell_factor,visibility,threshold");
    ASSERT_EQ(rows.size(), 200u);
    double lo = 0, hi = 0;
    ASSERT_TRUE(first_crossing(rows, 1.0 / std::numbers::sqrt2, lo, hi));
    EXPECT_EQ(lo, 16.0);
    EXPECT_EQ(hi, 17.0);
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(CliBinary, DelaySweepCrossingAndRoundTrip) {
    const auto dir = scratch_dir();
    const auto csv = dir / "delay.csv";
    const auto meta = dir / "delay.json";
    const auto r = run("sweep delay --purcell 30 --out " + csv.string() + " --meta " + meta.string());
    ASSERT_EQ(r.code, 0);
    const auto rows = read_csv(slurp(csv));
    ASSERT_EQ(rows.size(), 601u);
    double lo = 0, hi = 0;
    std::vector<std::vector<double>> positive(rows.begin() + 300, rows.end());
    ASSERT_TRUE(first_crossing(positive, 1.0 / std::numbers::sqrt2, lo, hi));
    EXPECT_NEAR(lo, 9.4, 1e-9);
    EXPECT_NEAR(hi, 9.5, 1e-9);

    const auto rates = tb::derive_rates(tb::EmitterParams{1000.0, 300.0, 30.0, tb::DirectPhase{0.0}});
    for (const auto& row : rows) {
        auto optics = tb::balanced_optics(12500.0);
        optics.interf2.d_tau_ps = 12500.0 - row[0];
        EXPECT_EQ(tb::cli::sig9(tb::visibility(rates, optics).v), tb::cli::sig9(row[1]));
    }
    const auto m = nlohmann::json::parse(slurp(meta));
    EXPECT_EQ(m["kind"], "delay");
    EXPECT_EQ(m["records"], 601);
    fs::remove_all(dir);
}

TEST(CliBinary, Map2dAndJitter) {
    auto r = run("sweep map2d --purcell 30 --steps 5 --steps2 5");
    ASSERT_EQ(r.code, 0);
    std::string header;
    auto rows = read_csv(r.out, &header);
    EXPECT_EQ(header, "t_minus_dtau1_ps,t_minus_dtau2_ps,visibility");
    ASSERT_EQ(rows.size(), 25u);
    EXPECT_EQ(rows[12][0], 0.0);
    EXPECT_EQ(rows[12][1], 0.0);
    EXPECT_NEAR(rows[12][2], 9.0 / 11.0, 1e-9);
    EXPECT_EQ(rows[1][0], -20.0);
    EXPECT_EQ(rows[1][1], -10.0);

    r = run("sweep jitter --purcell 30");
    rows = read_csv(r.out, &header);
    EXPECT_EQ(header, "jitter_ps,visibility");
    ASSERT_EQ(rows.size(), 201u);
    EXPECT_NEAR(rows[50][1], 0.80590909, 1e-8);
}

TEST(CliBinary, UnwritableOutput) {
    EXPECT_EQ(run("sweep purcell --out /nonexistent-dir/p.csv").code, 3);
}

TEST(CliBinary, Threshold) {
    auto r = run("threshold --json");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["purcell_threshold"].get<double>(), 16.0947571, 1e-6);
    EXPECT_TRUE(j["delay_window"].is_null());

    r = run("threshold --json --t2star 30");
    EXPECT_NEAR(nlohmann::json::parse(r.out)["purcell_threshold"].get<double>(), 160.947571, 1e-5);

    r = run("threshold --json --purcell 30 --wavelength 900");
    j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["delay_window"]["delta_mm"].get<double>(), 2.8276, 1e-3);
    EXPECT_NEAR(j["delay_window"]["delta_wavelengths"].get<double>(), 3141.78, 0.05);

    r = run("threshold --purcell 5 --wavelength 900");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("empty"), std::string::npos) << r.out;

    EXPECT_EQ(run("threshold --t2star 1 --target 0.9999").code, 1);
    EXPECT_EQ(run("threshold --target 1.5").code, 2);
}

TEST(CliBinary, ValidateQuadrature) {
    const auto r = run("validate quadrature --purcell 30 --dtau2-ps 12490.57 --phase 2");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(CliBinary, ValidateMcIsByteReproducible) {
    const auto a = run("validate mc --purcell 30 --samples 20000 --seed 7");
    const auto b = run("validate mc --purcell 30 --samples 20000 --seed 7");
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
    const auto c = run("validate mc --purcell 30 --samples 20000 --seed 8");
    EXPECT_NE(a.out, c.out);
}

TEST(CliBinary, ValidateCorrelator) {
    const auto r = run("validate correlator --samples 100000 --json");
    EXPECT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["rate_relative_error"].get<double>(), 0.02);
    EXPECT_EQ(run("validate correlator --t2star inf").code, 2);
}
