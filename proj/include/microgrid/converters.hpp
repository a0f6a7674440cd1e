#pragma once

#include <array>

namespace microgrid::converters {

// ---------------------------------------------------------------------------
// Boost average model
// ---------------------------------------------------------------------------

inline constexpr double kBoostEpsilon = 1e-6;  // V

/// Sample history of the boost average model. `v_dc_hist[0]` is V_dc(k-1),
/// `[1]` is V_dc(k-2) and `[2]` is V_dc(k-3).
struct BoostState {
    std::array<double, 3> v_dc_hist{0.0, 0.0, 0.0};
    double i_a_prev = 0.0;  // I_a(k-1)
    double epsilon = kBoostEpsilon;

    /// History filled with a constant output voltage and zero input current.
    static BoostState seeded(double v_dc, double epsilon = kBoostEpsilon);
};

/// Input-side controlled voltage source:  V_a(k) = (1 - D_b) V_dc(k-1).
double boost_input_voltage(const BoostState& state, double d_b);

/// Output-side controlled current source:
///   I_dc(k) = (1 - D_b) V_dc(k-2) I_a(k-1) / (2 V_dc(k-2) - V_dc(k-3) + eps)
double boost_output_current(const BoostState& state, double d_b);

/// Shifts in the output voltage and input current of the step just finished.
void push_history(BoostState& state, double v_dc, double i_a);

// ---------------------------------------------------------------------------
// Full-bridge PMU
// ---------------------------------------------------------------------------

struct PmuConfig {
    double n = 4.5;        // primary:secondary turns ratio
    double duty = 0.9;     // D
    double r_on = 0.1;     // ohm, active switch
    double r_d = 0.01;     // ohm, rectifier diode
    double v_d = 0.29;     // V, rectifier diode forward drop
    // Carried for reporting only; the averaged equations do not see them.
    double f_sw = 100e3;     // Hz
    double l_lk = 26e-6;     // H
    double l_out = 10e-6;    // H
    double c_out = 7500e-6;  // F
    double rated_va = 150.0; // VA

    double duty_complement() const { return 1.0 - duty; }
    double switching_period() const { return 1.0 / f_sw; }

    bool operator==(const PmuConfig&) const = default;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const PmuConfig& cfg);

struct PmuState {
    double i1 = 0.0;     // A, primary
    double i2 = 0.0;     // A, secondary (= n * i1)
    double v_out = 0.0;  // V, battery terminal
    double p_in = 0.0;   // W
    double p_out = 0.0;  // W
    double i_bus = 0.0;  // A, drawn from the DC bus (p_in / v_g)

    bool operator==(const PmuState&) const = default;
};

/// M(D) = (2D - 1)^2 / n
double fb_gain_ideal(double n, double d);

/// Loss-corrected gain M'(D) = M(D) [1 - 2 I1 R_on / (V_g (2D-1))
///                                   - 2 n V_D / (V_g (2D-1)^2)
///                                   - 2 n^2 I1 R_D / (V_g (2D-1)^2)].
/// Throws DomainError for duty <= 0.5 or v_g <= 0.
double fb_gain_lossy(const PmuConfig& cfg, double v_g, double i1);

/// Operating point of a PMU feeding a battery with open-circuit voltage `ocv`
/// and series resistance `r_bat` from bus voltage `v_g`.
///
/// Solves the loss-inclusive volt-second balance
///   (1/n) V_g (2D-1)^2 = (2/n) I1 R_on (2D-1) + V + 2 V_D + 2 n I1 R_D
/// with V = ocv + I2 r_bat and I2 = n I1, clamping I1 at 0 when the battery
/// voltage blocks the rectifier. p_in is p_out plus the switch, diode drop and
/// diode resistance losses.
///
/// Throws DomainError for v_g <= 0 or duty <= 0.5 and ConfigError when the
/// loss denominator is not positive.
PmuState pmu_solve_current(const PmuConfig& cfg, double v_g, double ocv, double r_bat);

}  // namespace microgrid::converters
