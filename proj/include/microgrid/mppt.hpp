#pragma once

namespace microgrid::mppt {

struct MpptConfig {
    double d_init = 0.5;
    double d_min = 0.1;
    double d_max = 0.9;
    double delta_d = 0.001;
    double sample_period = 1e-3;  // s
    bool enabled = true;

    bool operator==(const MpptConfig&) const = default;
};

/// Power changes smaller than this are treated as no change.
inline constexpr double kPowerDeadBand = 1e-6;  // W

struct MpptState {
    double prev_p = 0.0;  // W
    double prev_v = 0.0;  // V
    double duty = 0.0;
    double last_sample_time = 0.0;  // s
    bool initialized = false;
    bool perturbed = false;  // at least one perturbation has been applied
    int direction = +1;      // sign of the last duty perturbation
};

/// Throws ConfigError unless 0 <= d_min <= d_init <= d_max < 1, delta_d > 0
/// and sample_period > 0.
void validate(const MpptConfig& config);

/// Perturb-and-observe step on the PV samples (v_k, i_k).
///
/// Raising the boost duty lowers the PV voltage, so a power gain with a
/// falling voltage keeps increasing the duty and a power gain with a rising
/// voltage keeps decreasing it; a power loss reverses. When the voltage did not
/// move the stored perturbation sign decides. The first call only records the
/// history and outputs d_init; the first perturbation is always +delta_d.
/// A disabled controller returns the state untouched.
MpptState mppt_step(const MpptState& state, const MpptConfig& config, double v_k, double i_k,
                    double t = 0.0);

}  // namespace microgrid::mppt
