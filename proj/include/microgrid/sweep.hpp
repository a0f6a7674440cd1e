#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "microgrid/lookup.hpp"
#include "microgrid/scenario.hpp"

namespace microgrid::cli {

/// A manifest line: either a parsed scenario or the reason it failed to parse.
struct SweepEntry {
    std::string name;
    std::optional<Scenario> scenario;
    std::string error;
};

/// Reads a sweep manifest: one scenario path per line, relative to the
/// manifest's directory, with '#' comments. Per-file parse failures become
/// entries carrying the error; an unreadable manifest throws IoError.
std::vector<SweepEntry> read_manifest(const std::filesystem::path& manifest);

/// Runs every entry on up to `jobs` worker threads (0 picks the hardware
/// concurrency). Rows come back in entry order; a failing scenario yields an
/// error row and does not stop the others.
std::vector<LookupRow> run_sweep(const std::vector<SweepEntry>& entries, unsigned jobs = 0);

}  // namespace microgrid::cli
