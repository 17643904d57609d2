#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pma/identify.hpp"
#include "pma/metrics.hpp"
#include "pma/scenario.hpp"

namespace pma {

struct RunOptions {
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed_override;
};

/// Closed-loop run assembled from a scenario's blocks; requires the
/// [reference] and [controller] blocks.
Trajectory run_tracking(const Scenario& scenario);

/// Identification input assembled from a scenario: either a recorded CSV
/// (paths resolve relative to the scenario file) or synthetic runs
/// generated from the plant and signal blocks, noise added per run, and
/// the runs averaged sample-wise.
IdentificationProblem build_identification_problem(
    const Scenario& scenario, const std::filesystem::path& scenario_dir);

/// Subcommand entry points. Each writes its artifacts plus a run manifest
/// and a copy of the scenario into the output directory, all atomically.
/// Exit-code mapping happens in the CLI: ScenarioError and
/// std::invalid_argument mean invalid input (2), DivergenceError means the
/// integration blew up (3).
void run_characterize(const std::filesystem::path& scenario_path,
                      const RunOptions& options);
void run_identify(const std::filesystem::path& scenario_path,
                  const RunOptions& options);
void run_track(const std::filesystem::path& scenario_path,
               const RunOptions& options);
void run_compare(const std::filesystem::path& scenario_fb,
                 const std::filesystem::path& scenario_ct,
                 const RunOptions& options);
void run_metrics(const std::filesystem::path& scenario_path,
                 const std::filesystem::path& trajectory_csv,
                 const RunOptions& options);

/// FNV-1a 64-bit over a file's bytes, hex-formatted; identifies the exact
/// scenario revision in run manifests.
std::string file_fnv1a64(const std::filesystem::path& path);

}  // namespace pma
