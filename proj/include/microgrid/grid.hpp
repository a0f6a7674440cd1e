#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "microgrid/scenario.hpp"

namespace microgrid::grid {

struct BusState {
    double v_bus = 0.0;  // V
    double c_bus = 0.0;  // F
};

/// Per-step channels of one PMU.
struct PmuTrace {
    std::vector<double> v;      // battery terminal voltage
    std::vector<double> i;      // charge current (secondary)
    std::vector<double> p;      // output power
    std::vector<double> soc;    // state of charge after the step
    std::vector<double> i_bus;  // current drawn from the bus

    bool operator==(const PmuTrace&) const = default;
};

struct PmuMeans {
    double v = 0.0;
    double i = 0.0;
    double p = 0.0;
    double soc = 0.0;

    bool operator==(const PmuMeans&) const = default;
};

/// Means over a trailing window.
struct SteadyState {
    double window = 0.0;
    double g = 0.0;
    double pv_v = 0.0;
    double pv_i = 0.0;
    double pv_p = 0.0;
    double duty = 0.0;
    double v_bus = 0.0;
    double i_dc = 0.0;
    double src_p = 0.0;
    std::vector<PmuMeans> pmus;
    /// Sum of PMU output power over PV power; empty when the array is dark.
    std::optional<double> efficiency;

    double total_pmu_power() const;

    bool operator==(const SteadyState&) const = default;
};

/// Full record of one run, one entry per timestep.
///
/// Bus voltage is the value at the start of the step (the one the PMUs see);
/// SOC is the value after the step's coulomb count.
struct SimResult {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> g;
    std::vector<double> pv_v;
    std::vector<double> pv_i;
    std::vector<double> pv_p;
    std::vector<double> duty;
    std::vector<double> v_bus;
    std::vector<double> i_dc;
    std::vector<double> src_p;
    std::vector<PmuTrace> pmus;
    SteadyState summary;

    std::size_t size() const { return t.size(); }
    double run_length() const { return static_cast<double>(t.size()) * dt; }
    bool operator==(const SimResult&) const = default;
};

/// Runs the fixed-step engine. Each step: sample irradiance, set the PV
/// voltage from the boost input source, solve the PV current, run the MPPT on
/// its sample period, evaluate the boost output current, solve every PMU at
/// the present bus voltage, integrate the bus node by explicit Euler, count
/// battery charge (trapezoidal in the charge current) and shift the boost
/// history.
///
/// Throws SimulationError naming the failing step and component.
SimResult simulate(const Scenario& scenario);

/// Arithmetic means of every channel over the trailing `window` seconds.
/// DomainError when the result is empty or the window exceeds the run.
SteadyState steady_state_summary(const SimResult& result, double window);

/// Window of the channel's samples [first, last) as a mean.
double mean(const std::vector<double>& channel, std::size_t first, std::size_t last);

}  // namespace microgrid::grid
