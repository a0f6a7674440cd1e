#include "microgrid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "microgrid/errors.hpp"
#include "microgrid/grid.hpp"

namespace microgrid::cli {

std::vector<SweepEntry> read_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open sweep manifest '" + manifest.string() + "'");
    const std::filesystem::path base = manifest.parent_path();

    std::vector<SweepEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);

        const std::filesystem::path path = base / line;
        SweepEntry entry;
        entry.name = path.stem().string();
        try {
            entry.scenario = parse_scenario(path);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw ConfigError("sweep manifest '" + manifest.string() + "' lists no scenarios");
    return entries;
}

std::vector<LookupRow> run_sweep(const std::vector<SweepEntry>& entries, unsigned jobs) {
    std::vector<LookupRow> rows(entries.size());
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, entries.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            const SweepEntry& e = entries[i];
            if (!e.scenario) {
                rows[i] = error_row(e.name, e.error);
                continue;
            }
            try {
                rows[i] = make_lookup_row(*e.scenario, grid::simulate(*e.scenario));
            } catch (const Error& ex) {
                rows[i] = error_row(e.scenario->label, ex.what());
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace microgrid::cli
