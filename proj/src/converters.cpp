#include "microgrid/converters.hpp"

#include <cmath>

#include "microgrid/errors.hpp"

namespace microgrid::converters {

BoostState BoostState::seeded(double v_dc, double epsilon) {
    BoostState s;
    s.v_dc_hist = {v_dc, v_dc, v_dc};
    s.i_a_prev = 0.0;
    s.epsilon = epsilon;
    return s;
}

double boost_input_voltage(const BoostState& state, double d_b) {
    return (1.0 - d_b) * state.v_dc_hist[0];
}

double boost_output_current(const BoostState& state, double d_b) {
    const double v2 = state.v_dc_hist[1];
    const double v3 = state.v_dc_hist[2];
    const double num = (1.0 - d_b) * v2 * state.i_a_prev;
    if (num == 0.0) return 0.0;
    return num / (2.0 * v2 - v3 + state.epsilon);
}

void push_history(BoostState& state, double v_dc, double i_a) {
    state.v_dc_hist[2] = state.v_dc_hist[1];
    state.v_dc_hist[1] = state.v_dc_hist[0];
    state.v_dc_hist[0] = v_dc;
    state.i_a_prev = i_a;
}

void validate(const PmuConfig& cfg) {
    if (!(cfg.n > 0.0)) throw ConfigError("pmu.n must be positive");
    if (!(cfg.duty > 0.5)) throw ConfigError("pmu.duty must exceed 0.5");
    if (!(cfg.duty < 1.0)) throw ConfigError("pmu.duty must be below 1");
    if (!(cfg.r_on >= 0.0)) throw ConfigError("pmu.r_on must be non-negative");
    if (!(cfg.r_d >= 0.0)) throw ConfigError("pmu.r_d must be non-negative");
    if (!(cfg.v_d >= 0.0)) throw ConfigError("pmu.v_d must be non-negative");
    if (!(cfg.f_sw > 0.0)) throw ConfigError("pmu.f_sw must be positive");
    if (!(cfg.l_lk >= 0.0) || !(cfg.l_out >= 0.0) || !(cfg.c_out >= 0.0)) {
        throw ConfigError("pmu reactive component values must be non-negative");
    }
    if (!(cfg.rated_va > 0.0)) throw ConfigError("pmu.rated_va must be positive");
}

double fb_gain_ideal(double n, double d) {
    const double m = 2.0 * d - 1.0;
    return m * m / n;
}

double fb_gain_lossy(const PmuConfig& cfg, double v_g, double i1) {
    const double m = 2.0 * cfg.duty - 1.0;
    if (!(m > 0.0)) throw DomainError("fb_gain_lossy: duty must exceed 0.5");
    if (!(v_g > 0.0)) throw DomainError("fb_gain_lossy: input voltage must be positive");
    const double n = cfg.n;
    const double bracket = 1.0 - 2.0 * i1 * cfg.r_on / (v_g * m) - 2.0 * n * cfg.v_d / (v_g * m * m) -
                           2.0 * n * n * i1 * cfg.r_d / (v_g * m * m);
    return fb_gain_ideal(n, cfg.duty) * bracket;
}

PmuState pmu_solve_current(const PmuConfig& cfg, double v_g, double ocv, double r_bat) {
    const double m = 2.0 * cfg.duty - 1.0;
    if (!(m > 0.0)) throw DomainError("pmu_solve_current: duty must exceed 0.5");
    if (!(v_g > 0.0)) throw DomainError("pmu_solve_current: input voltage must be positive");
    const double n = cfg.n;

    const double denom = (2.0 / n) * cfg.r_on * m + 2.0 * n * cfg.r_d + n * r_bat;
    if (!(denom > 0.0)) throw ConfigError("pmu_solve_current: loss and battery resistances sum to zero");

    const double headroom = v_g * m * m / n - ocv - 2.0 * cfg.v_d;
    PmuState s;
    s.i1 = headroom > 0.0 ? headroom / denom : 0.0;
    s.i2 = n * s.i1;
    s.v_out = ocv + s.i2 * r_bat;
    s.p_out = s.v_out * s.i2;
    s.p_in = s.p_out + 2.0 * s.i1 * s.i1 * cfg.r_on + 2.0 * s.i2 * cfg.v_d + 2.0 * s.i2 * s.i2 * cfg.r_d;
    s.i_bus = s.p_in / v_g;
    return s;
}

}  // namespace microgrid::converters
