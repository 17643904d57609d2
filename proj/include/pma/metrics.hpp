#pragma once

#include <string>
#include <vector>

#include "pma/simulate.hpp"

namespace pma {

struct CycleMetrics {
  int cycle = 0;           // 1-based, counted after the transient skip
  double rms_error = 0.0;  // m
  double peak_error = 0.0; // m
};

struct MetricsReport {
  double rms_error = 0.0;      // m, over the post-transient window
  double phase_lag_deg = 0.0;  // (-180, 180], positive = response lags
  double overshoot_pct = 0.0;  // percent of reference amplitude
  double peak_error = 0.0;     // m
  std::vector<CycleMetrics> cycles;
};

/// Tracking metrics for a closed-loop trajectory against its reference
/// columns at reference frequency f. The first reference period is skipped
/// as transient and the remaining window is trimmed to whole periods; the
/// phase lag comes from the argmax of the circular cross-correlation of the
/// demeaned signals. Requires at least three full periods.
MetricsReport compute_metrics(const Trajectory& traj, double f);

/// One `key = value # unit` line per metric plus the per-cycle table.
std::string format_metrics_report(const MetricsReport& report);

}  // namespace pma
