#pragma once

#include <filesystem>
#include <string>

#include "pma/simulate.hpp"

namespace pma {

/// Formats a double with 17 significant digits, enough to round-trip.
std::string format_full(double v);

/// Writes `t,p_cmd,p_eff,x,v,z` rows (plus `x_d,v_d,e` when the reference
/// columns are present), one row per sample, full double precision.
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj,
                          const std::filesystem::path& path);

/// Reads a trajectory CSV back; columns are matched by header name and the
/// reference columns are optional. Throws std::runtime_error on malformed
/// input.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Writes a file atomically: the content lands under a temporary name in
/// the target directory first and is renamed into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace pma
