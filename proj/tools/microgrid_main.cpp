// Command-line front end: single runs, sweeps and PV maximum-power queries.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "microgrid/errors.hpp"
#include "microgrid/grid.hpp"
#include "microgrid/lookup.hpp"
#include "microgrid/pv.hpp"
#include "microgrid/scenario.hpp"
#include "microgrid/sweep.hpp"

namespace fs = std::filesystem;
using namespace microgrid;

namespace {

enum Exit : int { kOk = 0, kValidation = 1, kSimulation = 2, kIo = 3 };

constexpr const char* kOutDirEnv = "MICROGRID_OUT_DIR";

fs::path output_dir(const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "out";
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

int report(const std::exception& e, int code) {
    std::cerr << "error: " << e.what() << "\n";
    return code;
}

template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        return report(e, kValidation);
    } catch (const IoError& e) {
        return report(e, kIo);
    } catch (const Error& e) {
        return report(e, kSimulation);
    }
}

int cmd_simulate(const std::string& cfg, const std::optional<std::string>& out, bool dry_run,
                 const std::optional<double>& dt, const std::optional<double>& duration) {
    Scenario scenario = parse_scenario(cfg);
    if (dt) scenario.source.dt = *dt;
    if (duration) scenario.source.duration = *duration;
    validate(scenario);

    if (dry_run) {
        std::cout << dump_scenario(scenario);
        return kOk;
    }
    const fs::path dir = output_dir(out);
    prepare_dir(dir);

    const grid::SimResult result = grid::simulate(scenario);
    const cli::LookupRow row = cli::make_lookup_row(scenario, result);
    cli::write_timeseries_csv(dir / "timeseries.csv", result, scenario.log_interval);
    cli::write_lookup_csv(dir / "summary.csv", {row});
    cli::write_lookup_csv(std::cout, {row});
    return kOk;
}

int cmd_sweep(const std::string& manifest, const std::optional<std::string>& out, unsigned jobs) {
    const auto entries = cli::read_manifest(manifest);
    const fs::path dir = output_dir(out);
    prepare_dir(dir);

    const auto rows = cli::run_sweep(entries, jobs);
    cli::write_lookup_csv(dir / "lookup_table.csv", rows);
    cli::write_lookup_csv(std::cout, rows);

    int code = kOk;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].error.empty()) continue;
        std::cerr << "scenario " << entries[i].name << " failed: " << rows[i].error << "\n";
        if (code == kOk) code = entries[i].scenario ? kSimulation : kValidation;
    }
    return code;
}

int cmd_mpp(const std::optional<std::string>& cfg, std::optional<double> g, std::optional<double> t) {
    Scenario scenario;
    if (cfg) scenario = parse_scenario(*cfg);
    const pv::PvParams params = pv::fit_pv_params(scenario.pv);
    const double irradiance = g.value_or(scenario.profile.steps.front().g);
    const double t_cell = t.value_or(scenario.profile.t_cell);
    if (!(irradiance >= 0.0)) throw ConfigError("--g must be non-negative");
    const pv::PvOperatingPoint mpp = pv::pv_mpp(params, irradiance, t_cell);
    std::cout << "g_wm2,t_cell_c,v_mp,i_mp,p_mp\n"
              << cli::format_csv_number(irradiance) << "," << cli::format_csv_number(t_cell) << ","
              << cli::format_csv_number(mpp.v) << "," << cli::format_csv_number(mpp.i) << ","
              << cli::format_csv_number(mpp.p) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Averaged-model solar DC microgrid simulator"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run one scenario and write timeseries.csv and summary.csv");
    std::string sim_cfg;
    std::optional<std::string> sim_out;
    bool dry_run = false;
    std::optional<double> dt;
    std::optional<double> duration;
    sim->add_option("config", sim_cfg, "Scenario file")->required();
    sim->add_option("-o,--out", sim_out, std::string("Output directory (default $") + kOutDirEnv + " or ./out)");
    sim->add_flag("--dry-run", dry_run, "Validate and print the resolved scenario without running");
    sim->add_option("--dt", dt, "Override the timestep [s]");
    sim->add_option("--duration", duration, "Override the run length [s]");

    auto* sweep = app.add_subcommand("sweep", "Run every scenario of a manifest and write lookup_table.csv");
    std::string manifest;
    std::optional<std::string> sweep_out;
    unsigned jobs = 0;
    sweep->add_option("manifest", manifest, "Sweep manifest")->required();
    sweep->add_option("-o,--out", sweep_out, "Output directory");
    sweep->add_option("-j,--jobs", jobs, "Worker threads (0 = hardware concurrency)");

    auto* mpp = app.add_subcommand("mpp", "Print the PV maximum power point");
    std::optional<std::string> mpp_cfg;
    std::optional<double> g;
    std::optional<double> t;
    mpp->add_option("config", mpp_cfg, "Scenario file supplying the [pv] section");
    mpp->add_option("--g", g, "Irradiance [W/m^2] (default: first profile level)");
    mpp->add_option("--t", t, "Cell temperature [degC] (default: profile t_cell)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    if (*sim) return guarded([&] { return cmd_simulate(sim_cfg, sim_out, dry_run, dt, duration); });
    if (*sweep) return guarded([&] { return cmd_sweep(manifest, sweep_out, jobs); });
    return guarded([&] { return cmd_mpp(mpp_cfg, g, t); });
}
