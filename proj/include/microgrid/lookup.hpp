#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "microgrid/grid.hpp"
#include "microgrid/scenario.hpp"

namespace microgrid::cli {

struct PmuColumns {
    double v = 0.0;
    double i = 0.0;
    double p = 0.0;

    bool operator==(const PmuColumns&) const = default;
};

/// One row of the performance look-up table.
struct LookupRow {
    std::string label;
    std::optional<double> f_sw_khz;
    std::string battery_desc;
    std::optional<double> irradiance_wm2;
    std::optional<double> pv_v;
    std::optional<double> pv_i;
    std::optional<double> src_v;
    std::optional<double> src_i;
    std::optional<double> src_p_mean;
    std::optional<double> mppt_duty;
    std::optional<PmuColumns> pmu1;
    std::optional<PmuColumns> pmu2;
    std::optional<double> efficiency_pct;
    std::string error;

    bool operator==(const LookupRow&) const = default;
};

/// Column names in output order.
const std::vector<std::string>& lookup_columns();

/// Builds the row from a finished run. Efficiency uses all PMUs, the PMU
/// columns show the first two.
LookupRow make_lookup_row(const Scenario& scenario, const grid::SimResult& result);

/// Row for a scenario that could not be run.
LookupRow error_row(std::string label, std::string error);

/// Fixed six-significant-digit formatting.
std::string format_csv_number(double v);

void write_lookup_csv(std::ostream& os, const std::vector<LookupRow>& rows);
void write_lookup_csv(const std::filesystem::path& path, const std::vector<LookupRow>& rows);

/// Time series decimated to one row per `log_interval`.
void write_timeseries_csv(std::ostream& os, const grid::SimResult& result, double log_interval);
void write_timeseries_csv(const std::filesystem::path& path, const grid::SimResult& result, double log_interval);

}  // namespace microgrid::cli
