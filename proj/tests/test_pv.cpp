#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "microgrid/pv.hpp"

using namespace microgrid;
using namespace microgrid::pv;

namespace {

const PvParams& module() { return spr315e_params(); }

// Brute-force maximum of v*i over an evenly spaced voltage grid.
PvOperatingPoint grid_scan(const PvParams& p, double g, double t, int points = 10000) {
    const double voc = pv_open_circuit_voltage(p, g, t);
    PvOperatingPoint best{0, 0, 0, g, t};
    for (int k = 0; k <= points; ++k) {
        const double v = voc * k / points;
        const double i = pv_current(p, v, g, t);
        if (v * i > best.p) best = {v, i, v * i, g, t};
    }
    return best;
}

}  // namespace

TEST(PvFit, ReproducesDatasheetPoints) {
    const PvParams& p = module();
    const PvDatasheet& ds = p.datasheet;
    EXPECT_NEAR(pv_current(p, 0.0, 1000, 25), ds.i_sc, 1e-6);
    EXPECT_NEAR(pv_open_circuit_voltage(p, 1000, 25), ds.v_oc, 1e-6);
    EXPECT_NEAR(pv_current(p, ds.v_mp, 1000, 25), ds.i_mp, 1e-6);
    const PvOperatingPoint stc = pv_mpp(p, 1000, 25);
    EXPECT_NEAR(stc.v, ds.v_mp, 0.01);
    EXPECT_NEAR(stc.p, ds.v_mp * ds.i_mp, 1e-3);
}

TEST(PvFit, ParameterInvariants) {
    const PvParams& p = module();
    EXPECT_GE(p.ideality_factor, 1.0);
    EXPECT_LE(p.ideality_factor, 2.5);
    EXPECT_GT(p.reference.series_resistance, 0.0);
    EXPECT_GT(p.reference.shunt_resistance(), 0.0);
    EXPECT_GT(p.reference.saturation_current, 0.0);
}

TEST(PvFit, RejectsInconsistentDatasheet) {
    PvDatasheet ds;
    ds.v_mp = ds.v_oc + 1.0;
    EXPECT_THROW(fit_pv_params(ds), ConfigError);
    ds = PvDatasheet{};
    ds.i_mp = ds.i_sc;
    EXPECT_THROW(fit_pv_params(ds), ConfigError);
}

TEST(PvCurrent, OpenAndShortCircuit) {
    const PvParams& p = module();
    const double voc = pv_open_circuit_voltage(p, 1000, 25);
    EXPECT_NEAR(pv_current(p, voc, 1000, 25), 0.0, 1e-8);
    EXPECT_EQ(pv_current(p, voc + 5.0, 1000, 25), 0.0);
    EXPECT_NEAR(pv_current(p, 0.0, 1000, 25), p.datasheet.i_sc, 0.01 * p.datasheet.i_sc);
}

TEST(PvCurrent, ReferenceOperatingPoint) {
    EXPECT_NEAR(pv_current(module(), 51.88, 1000, 40), 5.798, 0.02 * 5.798);
}

TEST(PvCurrent, DarkArrayDeliversNothing) {
    EXPECT_EQ(pv_current(module(), 0.0, 0.0, 40), 0.0);
    EXPECT_EQ(pv_current(module(), 30.0, 0.0, 40), 0.0);
}

TEST(PvCurrent, NonIncreasingInVoltage) {
    const PvParams& p = module();
    for (double g : {50.0, 500.0, 1000.0}) {
        const double voc = pv_open_circuit_voltage(p, g, 40);
        double prev = pv_current(p, 0.0, g, 40);
        for (int k = 1; k <= 4000; ++k) {
            const double i = pv_current(p, voc * k / 4000, g, 40);
            EXPECT_LE(i, prev + 2e-9) << "g=" << g << " k=" << k;
            prev = i;
        }
    }
}

TEST(PvCurrent, PhotocurrentScalesWithIrradiance) {
    const PvParams& p = module();
    for (double g : {1000.0, 600.0, 200.0}) {
        const double ratio = pv_current(p, 0.0, g, 40) / pv_current(p, 0.0, g / 2, 40);
        EXPECT_NEAR(ratio, 2.0, 0.02);
    }
}

TEST(PvCurrent, SolverFailureCarriesConditions) {
    // A photocurrent around 1e58 A cannot be bracketed to 1e-9 A in 200 halvings.
    try {
        pv_current(module(), 1.0, 1e60, 40);
        FAIL() << "expected PvSolverError";
    } catch (const PvSolverError& e) {
        EXPECT_EQ(e.voltage(), 1.0);
        EXPECT_EQ(e.irradiance(), 1e60);
        EXPECT_EQ(e.cell_temperature(), 40);
    }
}

TEST(PvCurrent, RejectsNegativeInputs) {
    EXPECT_THROW(pv_current(module(), -1.0, 1000, 25), DomainError);
    EXPECT_THROW(pv_current(module(), 1.0, -1.0, 25), DomainError);
}

TEST(PvMpp, DatasheetAnchorAt40C) {
    const PvOperatingPoint mpp = pv_mpp(module(), 1000, 40);
    EXPECT_NEAR(mpp.p, 300.8, 0.02 * 300.8);
    EXPECT_GE(mpp.v, 50.8);
    EXPECT_LE(mpp.v, 53.0);
    EXPECT_DOUBLE_EQ(mpp.p, mpp.v * mpp.i);
}

TEST(PvMpp, ZeroIrradiance) {
    const PvOperatingPoint mpp = pv_mpp(module(), 0.0, 40);
    EXPECT_EQ(mpp.p, 0.0);
}

TEST(PvMpp, HalfIrradianceAgainstGridScan) {
    const PvOperatingPoint full = pv_mpp(module(), 1000, 40);
    const PvOperatingPoint half = pv_mpp(module(), 500, 40);
    const PvOperatingPoint scan = grid_scan(module(), 500, 40);
    EXPECT_NEAR(half.p, scan.p, 1e-3);
    EXPECT_NEAR(half.p, full.p / 2, 0.1 * full.p / 2);
}

TEST(PvMpp, MatchesGridScanWithinOneStep) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> g_dist(20.0, 1100.0);
    std::uniform_real_distribution<double> t_dist(-10.0, 70.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double g = g_dist(rng);
        const double t = t_dist(rng);
        const PvOperatingPoint mpp = pv_mpp(module(), g, t);
        const PvOperatingPoint scan = grid_scan(module(), g, t);
        const double step = pv_open_circuit_voltage(module(), g, t) / 10000;
        EXPECT_NEAR(mpp.v, scan.v, step) << "g=" << g << " t=" << t;
        EXPECT_GE(mpp.p, scan.p - 1e-9);
    }
}

TEST(PvMpp, PowerCurveIsUnimodal) {
    const PvParams& p = module();
    for (double g : {50.0, 1000.0}) {
        const double voc = pv_open_circuit_voltage(p, g, 40);
        int sign_changes = 0;
        double prev_p = 0.0;
        int prev_sign = +1;
        for (int k = 1; k <= 10000; ++k) {
            const double v = voc * k / 10000;
            const double pw = v * pv_current(p, v, g, 40);
            const int sign = pw >= prev_p ? +1 : -1;
            if (sign != prev_sign) ++sign_changes;
            prev_sign = sign;
            prev_p = pw;
        }
        EXPECT_EQ(sign_changes, 1) << "g=" << g;
    }
}
