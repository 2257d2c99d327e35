// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <variant>

#include <gtest/gtest.h>

#include "timebin/run_config.hpp"

namespace tb = timebin;

namespace {

tb::RunConfig from_text(const char* text) {
    tb::Settings s;
    tb::parse_config_text(s, text);
    return tb::build_run_config(s);
}

} // namespace

TEST(RunConfig, DefaultsAreBareDot) {
    const auto cfg = tb::build_run_config({});
    EXPECT_EQ(cfg.emitter.t1_vac_ps, 1000.0);
    EXPECT_EQ(cfg.emitter.t2_star_ps, 300.0);
    EXPECT_EQ(cfg.emitter.purcell_factor, 1.0);
    EXPECT_EQ(cfg.optics.emission_delay_ps, 12500.0);
    EXPECT_EQ(cfg.optics.interf1.d_tau_ps, 12500.0);
    EXPECT_EQ(cfg.optics.interf2.d_tau_ps, 12500.0);
    EXPECT_FALSE(cfg.wavelength_nm.has_value());
    EXPECT_EQ(cfg.oracle.samples, 20000u);
}

TEST(RunConfig, ParsesCommentsAndBlankLines) {
    const auto cfg = from_text("# quasi-resonant dot\n"
                               "\n"
                               "t1_vac_ns = 1      # lifetime\n"
                               "t2_star_ps=300\r\n"
                               "  purcell  =  16\n"
                               "delay_T_ps = 20000\n"
                               "dtau2_ps = 19990\n"
                               "wavelength_nm = 900\n"
                               "seed = 12345678901234\n");
    EXPECT_EQ(cfg.emitter.t1_vac_ps, 1000.0);
    EXPECT_EQ(cfg.emitter.purcell_factor, 16.0);
    EXPECT_EQ(cfg.optics.interf1.d_tau_ps, 20000.0);
    EXPECT_EQ(cfg.optics.interf2.d_tau_ps, 19990.0);
    ASSERT_TRUE(cfg.wavelength_nm.has_value());
    EXPECT_TRUE(std::holds_alternative<tb::Wavelength>(cfg.emitter.carrier));
    EXPECT_EQ(cfg.oracle.seed, 12345678901234u);
}

TEST(RunConfig, NanosecondConversion) {
    tb::Settings s;
    tb::set_setting(s, "t2_star_ns", "0.3");
    tb::set_setting(s, "jitter_ns", "0.0005");
    const auto cfg = tb::build_run_config(s);
    EXPECT_DOUBLE_EQ(cfg.emitter.t2_star_ps, 300.0);
    EXPECT_DOUBLE_EQ(cfg.optics.jitter_ps, 0.5);
}

TEST(RunConfig, LaterAssignmentWinsAcrossUnits) {
    tb::Settings s;
    tb::parse_config_text(s, "t1_vac_ns = 2\n");
    tb::set_setting(s, "t1_vac_ps", "500");
    EXPECT_EQ(tb::build_run_config(s).emitter.t1_vac_ps, 500.0);
    tb::set_setting(s, "t1_vac_ns", "0.25");
    EXPECT_DOUBLE_EQ(tb::build_run_config(s).emitter.t1_vac_ps, 250.0);
}

TEST(RunConfig, InfiniteDephasingTime) {
    tb::Settings s;
    tb::set_setting(s, "t2_star_ps", "inf");
    EXPECT_TRUE(std::isinf(tb::build_run_config(s).emitter.t2_star_ps));
}

TEST(RunConfig, CarrierPrecedence) {
    const auto phase = from_text("phase_rad = 1.5\nwavelength_nm = 900\n");
    ASSERT_TRUE(std::holds_alternative<tb::DirectPhase>(phase.emitter.carrier));
    EXPECT_EQ(std::get<tb::DirectPhase>(phase.emitter.carrier).rad, 1.5);
    EXPECT_TRUE(phase.wavelength_nm.has_value());

    const auto omega = from_text("omega_rad_per_ps = 2\nwavelength_nm = 900\n");
    EXPECT_TRUE(std::holds_alternative<tb::AngularFrequency>(omega.emitter.carrier));

    EXPECT_THROW(from_text("omega_rad_per_ps = 2\nphase_rad = 1\n"), tb::InvalidParameter);
}

TEST(RunConfig, Errors) {
    tb::Settings s;
    EXPECT_THROW(tb::set_setting(s, "t1vac", "1000"), tb::InvalidParameter);
    EXPECT_THROW(tb::set_setting(s, "purcell", "  "), tb::InvalidParameter);
    EXPECT_THROW(tb::set_setting(s, "t1_vac_ns", "abc"), tb::InvalidParameter);
    EXPECT_THROW(from_text("purcell 30\n"), tb::InvalidParameter);
    EXPECT_THROW(from_text("purcell = 30x\n"), tb::InvalidParameter);
    EXPECT_THROW(from_text("samples = -5\n"), tb::InvalidParameter);
    EXPECT_THROW(from_text("wavelength_nm = 0\n"), tb::InvalidParameter);
    EXPECT_THROW(from_text("grid_divisor = 0\n"), tb::InvalidParameter);

    try {
        from_text("purcell = 0.5\n");
        FAIL() << "expected InvalidParameter";
    } catch (const tb::InvalidParameter& e) {
        EXPECT_EQ(e.field(), "purcell_factor");
    }
    try {
        from_text("r_if1 = 0.7\nt_if1 = 0.7\n");
        FAIL() << "expected InvalidParameter";
    } catch (const tb::InvalidParameter& e) {
        EXPECT_NE(std::string(e.what()).find("if1"), std::string::npos) << e.what();
    }
}
