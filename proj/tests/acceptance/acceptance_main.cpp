// Acceptance gate: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "microgrid/converters.hpp"
#include "microgrid/grid.hpp"
#include "microgrid/pv.hpp"
#include "microgrid/scenario.hpp"
#include "microgrid/storage.hpp"
#include "microgrid/sweep.hpp"

using namespace microgrid;

namespace {

const std::filesystem::path kScenarios = MICROGRID_SCENARIO_DIR;

// PV anchor
constexpr double kAnchorPower = 300.8;
constexpr double kAnchorRelTol = 0.02;
constexpr double kAnchorVMin = 50.8;
constexpr double kAnchorVMax = 53.0;
constexpr double kAnchorSeconds = 1.0;

// MPPT convergence
constexpr double kTrackingFraction = 0.99;
constexpr double kDutyReference = 0.4768;
constexpr double kDutyTol = 0.02;
constexpr double kTrackingSeconds = 10.0;

// Look-up table reproduction
constexpr double kEffMin = 93.0;
constexpr double kEffMax = 94.5;
constexpr double kVoltTol = 0.3;
constexpr double kEqualSplitTol = 1e-9;
constexpr double kTableSeconds = 120.0;
// Terminal voltages per manifest row, pmu1 then pmu2.
constexpr std::array<std::array<double, 2>, 8> kTableVolts{{
    {13.02, 13.02},
    {12.96, 12.75},
    {37.61, 37.61},
    {37.57, 37.12},
    {13.02, 13.02},
    {12.95, 12.75},
    {37.65, 37.65},
    {37.65, 37.12},
}};

// Unequal sharing
constexpr double kRatioMin = 1.1;
constexpr double kRatioMax = 1.5;

// Gain oracle
constexpr int kOracleSamples = 1000;
constexpr double kOracleRelTol = 1e-12;

// Conservation
constexpr double kBoostRelTol = 1e-4;
constexpr double kLossRelTol = 1e-12;
constexpr double kCoulombRelTol = 1e-6;
constexpr double kBusRelTol = 1e-4;

// Irradiance steps
constexpr double kProportionalTol = 0.10;
constexpr double kRecoveryWindow = 10e-3;  // s
constexpr double kRecoverySpan = 0.5;      // s after the last step
constexpr double kSettledBand = 0.01;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct TableRun {
    std::string name;
    Scenario scenario;
    grid::SimResult result;
};

std::vector<TableRun>& table_runs(double* elapsed = nullptr) {
    static std::vector<TableRun> runs;
    static double seconds = 0.0;
    if (runs.empty()) {
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& e : cli::read_manifest(kScenarios / "lookup.sweep")) {
            if (!e.scenario) throw std::runtime_error(e.name + ": " + e.error);
            runs.push_back({e.name, *e.scenario, grid::simulate(*e.scenario)});
        }
        seconds = seconds_since(t0);
    }
    if (elapsed) *elapsed = seconds;
    return runs;
}

void pv_anchor() {
    const auto t0 = std::chrono::steady_clock::now();
    const pv::PvOperatingPoint mpp = pv::pv_mpp(pv::fit_pv_params(pv::PvDatasheet{}), 1000.0, 40.0);
    const double secs = seconds_since(t0);
    const bool pass = std::abs(mpp.p - kAnchorPower) <= kAnchorRelTol * kAnchorPower && mpp.v >= kAnchorVMin &&
                      mpp.v <= kAnchorVMax && secs < kAnchorSeconds;
    report("PV anchor", pass, fmt("P_mp=%.3f W (300.8 +/-2%%), V_mp=%.3f V ([50.8, 53.0]), %.3f s", mpp.p, mpp.v, secs));
}

void mppt_convergence() {
    Scenario s;
    s.profile.steps = {{0.0, 1000.0}};
    const auto t0 = std::chrono::steady_clock::now();
    const grid::SimResult r = grid::simulate(s);
    const double secs = seconds_since(t0);
    const double mpp = pv::pv_mpp(pv::spr315e_params(), 1000.0, s.profile.t_cell).p;
    const double fraction = r.summary.pv_p / mpp;
    const bool pass = fraction >= kTrackingFraction && std::abs(r.summary.duty - kDutyReference) <= kDutyTol &&
                      secs < kTrackingSeconds;
    report("MPPT convergence", pass,
           fmt("mean P_pv=%.3f W = %.4f of MPP (>= 0.99), duty=%.4f (0.4768 +/-0.02), %.3f s", r.summary.pv_p,
               fraction, r.summary.duty, secs));
}

void table_reproduction() {
    double secs = 0.0;
    const auto& runs = table_runs(&secs);
    bool pass = runs.size() == kTableVolts.size() && secs < kTableSeconds;
    double eff_lo = 1e9;
    double eff_hi = -1e9;
    double worst_v = 0.0;
    double worst_split = 0.0;
    for (std::size_t k = 0; k < runs.size() && k < kTableVolts.size(); ++k) {
        const auto& s = runs[k].result.summary;
        const double eff = 100.0 * s.efficiency.value_or(0.0);
        eff_lo = std::min(eff_lo, eff);
        eff_hi = std::max(eff_hi, eff);
        pass = pass && eff >= kEffMin && eff <= kEffMax && s.pmus.size() == 2;
        for (std::size_t j = 0; j < 2 && j < s.pmus.size(); ++j) {
            const double dv = std::abs(s.pmus[j].v - kTableVolts[k][j]);
            worst_v = std::max(worst_v, dv);
            pass = pass && dv <= kVoltTol;
        }
        const auto& pmus = runs[k].scenario.pmus;
        if (pmus.size() == 2 && pmus[0] == pmus[1]) {
            const double split = rel(s.pmus[0].p, s.pmus[1].p);
            worst_split = std::max(worst_split, split);
            pass = pass && split < kEqualSplitTol;
        }
    }
    report("Look-up table reproduction", pass,
           fmt("%zu rows, efficiency %.3f..%.3f %% ([93.0, 94.5]), worst |dV|=%.3f V (<= 0.3), "
               "equal split %.2e (< 1e-9), %.2f s",
               runs.size(), eff_lo, eff_hi, worst_v, worst_split, secs));
}

void unequal_sharing() {
    bool pass = true;
    int mixed = 0;
    std::string detail;
    for (const auto& run : table_runs()) {
        const auto& pmus = run.scenario.pmus;
        if (pmus.size() != 2 || pmus[0].battery.capacity == pmus[1].battery.capacity) continue;
        ++mixed;
        const std::size_t big = pmus[1].battery.capacity > pmus[0].battery.capacity ? 1 : 0;
        const double p_big = run.result.summary.pmus[big].p;
        const double p_small = run.result.summary.pmus[1 - big].p;
        const double ratio = p_big / p_small;
        pass = pass && p_big > p_small && ratio >= kRatioMin && ratio <= kRatioMax;
        detail += fmt("%s %.1f/%.1f W ratio %.3f; ", run.name.c_str(), p_small, p_big, ratio);
    }
    pass = pass && mixed > 0;
    report("Unequal sharing", pass, detail + "ratio in [1.1, 1.5]");
}

void frequency_independence() {
    const auto& runs = table_runs();
    bool pass = runs.size() == 8;
    int pairs = 0;
    for (std::size_t k = 0; k + 4 < runs.size(); ++k) {
        const auto& a = runs[k];
        const auto& b = runs[k + 4];
        const bool metadata_only = [&] {
            Scenario x = a.scenario;
            Scenario y = b.scenario;
            x.label = y.label;
            for (auto& p : x.pmus) p.pmu.f_sw = 0.0;
            for (auto& p : y.pmus) p.pmu.f_sw = 0.0;
            return x == y && a.scenario.pmus[0].pmu.f_sw != b.scenario.pmus[0].pmu.f_sw;
        }();
        pass = pass && metadata_only && a.result == b.result;
        ++pairs;
    }
    report("Frequency independence", pass, fmt("%d 100 kHz / 50 kHz pairs bit-identical", pairs));
}

// Term-by-term evaluation, kept separate from the library arithmetic.
double oracle_ideal(double n, double d) { return (2 * d - 1) * (2 * d - 1) / n; }

double oracle_lossy(double n, double d, double r_on, double r_d, double v_d, double v_g, double i1) {
    const double k = 2 * d - 1;
    const double t_on = 2 * i1 * r_on / (v_g * k);
    const double t_vd = 2 * n * v_d / (v_g * k * k);
    const double t_rd = 2 * n * n * i1 * r_d / (v_g * k * k);
    return oracle_ideal(n, d) * (1 - t_on - t_vd - t_rd);
}

void gain_oracle() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    bool lossless_exact = true;
    for (int k = 0; k < kOracleSamples; ++k) {
        converters::PmuConfig c;
        c.n = 0.5 + 6.0 * u(rng);
        c.duty = 0.51 + 0.48 * u(rng);
        c.r_on = 0.3 * u(rng);
        c.r_d = 0.05 * u(rng);
        c.v_d = 1.5 * u(rng);
        const double v_g = 20.0 + 180.0 * u(rng);
        const double i1 = 20.0 * u(rng);
        worst = std::max(worst, rel(converters::fb_gain_ideal(c.n, c.duty), oracle_ideal(c.n, c.duty)));
        worst = std::max(worst, rel(converters::fb_gain_lossy(c, v_g, i1),
                                    oracle_lossy(c.n, c.duty, c.r_on, c.r_d, c.v_d, v_g, i1)));
        converters::PmuConfig ideal = c;
        ideal.r_on = ideal.r_d = ideal.v_d = 0.0;
        lossless_exact = lossless_exact &&
                         converters::fb_gain_lossy(ideal, v_g, i1) == converters::fb_gain_ideal(c.n, c.duty);
    }
    report("Gain-formula oracle", worst <= kOracleRelTol && lossless_exact,
           fmt("%d samples, worst relative error %.2e (<= 1e-12), lossless reduction %s", kOracleSamples, worst,
               lossless_exact ? "exact" : "inexact"));
}

void conservation() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    double boost_worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        converters::BoostState b;
        const double v = 20.0 + 180.0 * u(rng);
        b.v_dc_hist = {v, v, v};
        b.i_a_prev = 0.1 + 8.0 * u(rng);
        const double d = 0.9 * u(rng);
        const double p_in = converters::boost_input_voltage(b, d) * b.i_a_prev;
        const double p_out = v * converters::boost_output_current(b, d);
        boost_worst = std::max(boost_worst, rel(p_in, p_out));
    }

    double loss_worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        converters::PmuConfig c;
        c.n = 1.0 + 5.0 * u(rng);
        c.duty = 0.6 + 0.39 * u(rng);
        c.r_on = 0.3 * u(rng);
        c.r_d = 0.05 * u(rng);
        c.v_d = 1.2 * u(rng);
        const auto s = converters::pmu_solve_current(c, 40.0 + 120.0 * u(rng), 5.0 + 40.0 * u(rng),
                                                     0.005 + 0.2 * u(rng));
        if (s.p_in == 0.0) continue;
        const double losses = 2 * s.i1 * s.i1 * c.r_on + 2 * s.i2 * c.v_d + 2 * s.i2 * s.i2 * c.r_d;
        loss_worst = std::max(loss_worst, std::abs((s.p_in - s.p_out) - losses) / s.p_in);
    }

    const grid::SimResult& r = table_runs()[1].result;
    const Scenario& sc = table_runs()[1].scenario;
    double coulomb_worst = 0.0;
    for (std::size_t j = 0; j < r.pmus.size(); ++j) {
        const auto& p = r.pmus[j];
        double charge = 0.0;
        for (std::size_t k = 1; k < r.size(); ++k) charge += 0.5 * (p.i[k - 1] + p.i[k]) * r.dt;
        const double expected = charge / (sc.pmus[j].battery.capacity * 3600.0);
        coulomb_worst = std::max(coulomb_worst, rel(p.soc.back() - p.soc.front(), expected));
    }

    double bus_worst = 0.0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        double draw = 0.0;
        for (const auto& p : r.pmus) draw += p.i_bus[k];
        const double expected = r.v_bus[k] + r.dt * (r.i_dc[k] - draw) / sc.source.c_bus;
        if (expected <= 0.0) continue;
        bus_worst = std::max(bus_worst, rel(r.v_bus[k + 1], expected));
    }

    const bool pass = boost_worst <= kBoostRelTol && loss_worst <= kLossRelTol && coulomb_worst <= kCoulombRelTol &&
                      bus_worst <= kBusRelTol;
    report("Conservation", pass,
           fmt("boost %.2e (<= 1e-4), PMU losses %.2e (<= 1e-12), coulomb %.2e (<= 1e-6), bus %.2e (<= 1e-4)",
               boost_worst, loss_worst, coulomb_worst, bus_worst));
}

void irradiance_steps() {
    const Scenario s;  // 1000 -> 500 -> 50 -> 1000 W/m^2, 3 s each
    const grid::SimResult r = grid::simulate(s);
    const auto per_plateau = static_cast<std::size_t>(std::llround(kSecondsPerProfileStep / r.dt));
    const auto tail = static_cast<std::size_t>(std::llround(kDefaultWindowFraction * kSecondsPerProfileStep / r.dt));

    std::vector<double> means;
    for (std::size_t k = 0; k < s.profile.steps.size(); ++k) {
        const std::size_t end = (k + 1) * per_plateau;
        means.push_back(grid::mean(r.pv_p, end - tail, end));
    }
    const double reference = means.front() / s.profile.steps.front().g;
    bool proportional = true;
    std::string detail;
    for (std::size_t k = 0; k < means.size(); ++k) {
        const double expected = reference * s.profile.steps[k].g;
        const double dev = (means[k] - expected) / expected;
        proportional = proportional && std::abs(dev) <= kProportionalTol;
        detail += fmt("%g W/m2 %.2f W (%+.1f%%); ", s.profile.steps[k].g, means[k], 100.0 * dev);
    }

    // Windowed means after the last step must rise until they settle within 1% of the plateau value.
    const std::size_t start = (s.profile.steps.size() - 1) * per_plateau;
    const auto w = static_cast<std::size_t>(std::llround(kRecoveryWindow / r.dt));
    const auto span = static_cast<std::size_t>(std::llround(kRecoverySpan / r.dt));
    const double settled = means.back();
    bool monotone = true;
    bool in_band = false;
    double prev = -1.0;
    for (std::size_t a = start; a + w <= start + span; a += w) {
        const double m = grid::mean(r.pv_p, a, a + w);
        if (!in_band) {
            monotone = monotone && m >= prev;
            in_band = std::abs(m - settled) <= kSettledBand * settled;
        } else {
            monotone = monotone && std::abs(m - settled) <= kSettledBand * settled;
        }
        prev = m;
    }
    monotone = monotone && in_band;
    detail += fmt("recovery %s", monotone ? "monotone" : "not monotone");
    report("Irradiance-step replay", proportional && monotone, detail + " (each plateau within 10%)");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{pv_anchor,  mppt_convergence, table_reproduction,
                                                      unequal_sharing, frequency_independence, gain_oracle,
                                                      conservation, irradiance_steps};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            report("criterion aborted", false, e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
