#include "microgrid/lookup.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "microgrid/errors.hpp"

namespace microgrid::cli {
namespace {

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string cell(const std::optional<double>& v) { return v ? format_csv_number(*v) : std::string{}; }

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

const std::vector<std::string>& lookup_columns() {
    static const std::vector<std::string> cols{
        "label",  "f_sw_khz", "battery_desc", "irradiance_wm2", "pv_v",   "pv_i",
        "src_v",  "src_i",    "src_p_mean",   "mppt_duty",      "pmu1_v", "pmu1_i",
        "pmu1_p", "pmu2_v",   "pmu2_i",       "pmu2_p",         "efficiency_pct", "error",
    };
    return cols;
}

std::string format_csv_number(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

LookupRow make_lookup_row(const Scenario& scenario, const grid::SimResult& result) {
    const grid::SteadyState& s = result.summary;
    LookupRow row;
    row.label = scenario.label;
    row.f_sw_khz = scenario.pmus.front().pmu.f_sw / 1000.0;
    row.battery_desc = battery_description(scenario);
    row.irradiance_wm2 = s.g;
    row.pv_v = s.pv_v;
    row.pv_i = s.pv_i;
    row.src_v = s.v_bus;
    row.src_i = s.i_dc;
    row.src_p_mean = s.src_p;
    row.mppt_duty = s.duty;
    if (!s.pmus.empty()) row.pmu1 = PmuColumns{s.pmus[0].v, s.pmus[0].i, s.pmus[0].p};
    if (s.pmus.size() > 1) row.pmu2 = PmuColumns{s.pmus[1].v, s.pmus[1].i, s.pmus[1].p};
    if (s.efficiency) row.efficiency_pct = 100.0 * *s.efficiency;
    return row;
}

LookupRow error_row(std::string label, std::string error) {
    LookupRow row;
    row.label = std::move(label);
    row.error = std::move(error);
    return row;
}

void write_lookup_csv(std::ostream& os, const std::vector<LookupRow>& rows) {
    const auto& cols = lookup_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : rows) {
        auto pmu = [](const std::optional<PmuColumns>& p) {
            if (!p) return std::string(",,");
            return format_csv_number(p->v) + "," + format_csv_number(p->i) + "," + format_csv_number(p->p);
        };
        os << csv_text(r.label) << "," << cell(r.f_sw_khz) << "," << csv_text(r.battery_desc) << ","
           << cell(r.irradiance_wm2) << "," << cell(r.pv_v) << "," << cell(r.pv_i) << "," << cell(r.src_v) << ","
           << cell(r.src_i) << "," << cell(r.src_p_mean) << "," << cell(r.mppt_duty) << "," << pmu(r.pmu1) << ","
           << pmu(r.pmu2) << "," << cell(r.efficiency_pct) << "," << csv_text(r.error) << "\n";
    }
}

void write_lookup_csv(const std::filesystem::path& path, const std::vector<LookupRow>& rows) {
    auto out = open_for_write(path);
    write_lookup_csv(out, rows);
    finish(out, path);
}

void write_timeseries_csv(std::ostream& os, const grid::SimResult& r, double log_interval) {
    os << "t,g,pv_v,pv_i,pv_p,duty,v_bus,i_dc";
    for (std::size_t j = 0; j < r.pmus.size(); ++j) {
        const std::string p = "pmu" + std::to_string(j + 1);
        os << "," << p << "_v," << p << "_i," << p << "_p," << p << "_soc";
    }
    os << "\n";
    const auto stride = static_cast<std::size_t>(std::max<long long>(1, std::llround(log_interval / r.dt)));
    for (std::size_t k = 0; k < r.size(); k += stride) {
        os << format_csv_number(r.t[k]) << "," << format_csv_number(r.g[k]) << "," << format_csv_number(r.pv_v[k])
           << "," << format_csv_number(r.pv_i[k]) << "," << format_csv_number(r.pv_p[k]) << ","
           << format_csv_number(r.duty[k]) << "," << format_csv_number(r.v_bus[k]) << ","
           << format_csv_number(r.i_dc[k]);
        for (const auto& trace : r.pmus) {
            os << "," << format_csv_number(trace.v[k]) << "," << format_csv_number(trace.i[k]) << ","
               << format_csv_number(trace.p[k]) << "," << format_csv_number(trace.soc[k]);
        }
        os << "\n";
    }
}

void write_timeseries_csv(const std::filesystem::path& path, const grid::SimResult& result, double log_interval) {
    auto out = open_for_write(path);
    write_timeseries_csv(out, result, log_interval);
    finish(out, path);
}

}  // namespace microgrid::cli
