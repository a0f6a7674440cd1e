#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microgrid/converters.hpp"
#include "microgrid/mppt.hpp"
#include "microgrid/pv.hpp"
#include "microgrid/storage.hpp"

namespace microgrid {

struct IrradianceStep {
    double start = 0.0;  // s
    double g = 0.0;      // W/m^2

    bool operator==(const IrradianceStep&) const = default;
};

/// Piecewise-constant irradiance with a fixed cell temperature.
struct IrradianceProfile {
    std::vector<IrradianceStep> steps{{0.0, 1000.0}, {3.0, 500.0}, {6.0, 50.0}, {9.0, 1000.0}};
    double t_cell = 40.0;  // degC

    /// Irradiance in force at time t.
    double at(double t) const;

    bool operator==(const IrradianceProfile&) const = default;
};

/// Settings of the source converter and of the bus node it feeds.
struct SourceSettings {
    double epsilon = converters::kBoostEpsilon;  // V
    double c_bus = 2000e-6;                      // F
    double v_bus_init = 48.0;                    // V
    double dt = 50e-6;                           // s
    std::optional<double> duration;              // s; default 3 s per profile step
    std::optional<double> window;                // s; default last 20 % of the run

    bool operator==(const SourceSettings&) const = default;
};

inline constexpr double kSecondsPerProfileStep = 3.0;
inline constexpr double kDefaultWindowFraction = 0.2;

/// One PMU and the battery it charges.
struct PmuSetup {
    converters::PmuConfig pmu;
    storage::BatteryConfig battery;

    bool operator==(const PmuSetup&) const = default;
};

/// 12 V and 36 V class presets.
PmuSetup pmu_preset_12v(double capacity = storage::kReferenceCapacity);
PmuSetup pmu_preset_36v(double capacity = storage::kReferenceCapacity);

struct Scenario {
    std::string label = "default";
    pv::PvDatasheet pv;
    mppt::MpptConfig mppt;
    SourceSettings source;
    std::vector<PmuSetup> pmus{pmu_preset_12v(), pmu_preset_12v()};
    IrradianceProfile profile;
    double log_interval = 1e-3;  // s between rows of the time-series CSV

    double resolved_duration() const;
    double resolved_window() const;

    bool operator==(const Scenario&) const = default;
};

/// Checks every nested invariant; throws ConfigError naming the offending key.
void validate(const Scenario& scenario);

/// Parses scenario text. Unknown keys, malformed lines and invariant
/// violations throw ConfigError; syntax errors carry the line number.
Scenario parse_scenario_text(std::string_view text);

/// Reads and parses a scenario file (IoError when unreadable).
Scenario parse_scenario(const std::filesystem::path& path);

/// Emits a scenario file that parses back to an identical Scenario.
std::string dump_scenario(const Scenario& scenario);

/// Short battery description, e.g. "12V 5.4Ah + 12V 10.8Ah".
std::string battery_description(const Scenario& scenario);

}  // namespace microgrid
