#include "microgrid/storage.hpp"

#include <algorithm>

#include "microgrid/errors.hpp"

namespace microgrid::storage {

BatteryConfig battery_12v(double capacity) {
    BatteryConfig cfg;
    cfg.v_nominal = 12.0;
    cfg.capacity = capacity;
    cfg.r_internal = 0.04 * kReferenceCapacity / capacity;
    cfg.ocv_at_0 = 11.8;
    cfg.ocv_at_1 = 13.0;
    return cfg;
}

BatteryConfig battery_36v(double capacity) {
    BatteryConfig cfg;
    cfg.v_nominal = 36.0;
    cfg.capacity = capacity;
    cfg.r_internal = 3.0 * 0.04 * kReferenceCapacity / capacity;
    // Flatter upper end than three 12 V curves stacked; places the 75 % SOC
    // resting voltage near 37 V.
    cfg.ocv_at_0 = 35.4;
    cfg.ocv_at_1 = 37.6;
    return cfg;
}

void validate(const BatteryConfig& cfg) {
    if (!(cfg.capacity > 0.0)) throw ConfigError("battery.capacity must be positive");
    if (!(cfg.soc_init >= 0.0 && cfg.soc_init <= 1.0)) throw ConfigError("battery.soc_init must lie in [0, 1]");
    if (!(cfg.r_internal > 0.0)) throw ConfigError("battery.r_internal must be positive");
    if (!(cfg.ocv_at_0 > 0.0)) throw ConfigError("battery.ocv_at_0 must be positive");
    if (!(cfg.ocv_at_1 > cfg.ocv_at_0)) throw ConfigError("battery.ocv_at_1 must exceed ocv_at_0");
    if (!(cfg.v_nominal > 0.0)) throw ConfigError("battery.v_nominal must be positive");
    if (!(cfg.response_time >= 0.0)) throw ConfigError("battery.response_time must be non-negative");
}

double battery_ocv(const BatteryConfig& cfg, double soc) {
    if (!(soc >= 0.0 && soc <= 1.0)) throw DomainError("battery_ocv: soc outside [0, 1]");
    return cfg.ocv_at_0 + soc * (cfg.ocv_at_1 - cfg.ocv_at_0);
}

BatteryState battery_initial_state(const BatteryConfig& cfg) {
    return BatteryState{cfg.soc_init, 0.0, battery_ocv(cfg, cfg.soc_init)};
}

BatteryState battery_step(const BatteryState& state, const BatteryConfig& cfg, double i_charge, double dt) {
    if (!(dt > 0.0)) throw DomainError("battery_step: dt must be positive");
    BatteryState next;
    next.soc = std::clamp(state.soc + i_charge * dt / (cfg.capacity * 3600.0), 0.0, 1.0);
    next.i_charge = i_charge;
    next.v_terminal = battery_ocv(cfg, next.soc) + i_charge * cfg.r_internal;
    return next;
}

}  // namespace microgrid::storage
