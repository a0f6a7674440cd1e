#pragma once

namespace microgrid::storage {

/// Lead-acid battery with a linear open-circuit voltage curve, a series
/// resistance and coulomb-counted state of charge.
struct BatteryConfig {
    double v_nominal = 12.0;      // V
    double capacity = 5.4;        // Ah
    double soc_init = 0.75;
    double r_internal = 0.04;     // ohm
    double ocv_at_0 = 11.8;       // V
    double ocv_at_1 = 13.0;       // V
    double response_time = 3000;  // s, reported only

    bool operator==(const BatteryConfig&) const = default;
};

struct BatteryState {
    double soc = 0.0;
    double i_charge = 0.0;    // A, positive charges the battery
    double v_terminal = 0.0;  // V
};

inline constexpr double kReferenceCapacity = 5.4;  // Ah

/// 12 V class defaults. Internal resistance scales as 1/capacity.
BatteryConfig battery_12v(double capacity = kReferenceCapacity);

/// 36 V class defaults: three 12 V units in series.
BatteryConfig battery_36v(double capacity = kReferenceCapacity);

/// Throws ConfigError naming the first violated invariant.
void validate(const BatteryConfig& cfg);

/// Open-circuit voltage at `soc`; DomainError outside [0, 1].
double battery_ocv(const BatteryConfig& cfg, double soc);

BatteryState battery_initial_state(const BatteryConfig& cfg);

/// Coulomb-counting update over `dt` seconds at constant `i_charge`.
/// SOC saturates at 0 and 1.
BatteryState battery_step(const BatteryState& state, const BatteryConfig& cfg, double i_charge, double dt);

}  // namespace microgrid::storage
