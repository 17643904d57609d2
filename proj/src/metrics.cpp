#include "pma/metrics.hpp"

#include <cmath>
#include <limits>

#include "pma/csv.hpp"

namespace pma {

MetricsReport compute_metrics(const Trajectory& traj, double f) {
  if (!traj.has_reference()) {
    throw std::invalid_argument("compute_metrics: trajectory has no reference");
  }
  if (!(f > 0.0)) {
    throw std::invalid_argument("compute_metrics: f must be > 0");
  }
  const double dt = traj.grid_dt();
  const auto period = static_cast<Eigen::Index>(std::llround(1.0 / (f * dt)));
  if (period < 4) {
    throw std::invalid_argument("compute_metrics: grid too coarse for f");
  }
  const Eigen::Index rows = traj.rows();
  if (rows < 3 * period + 1) {
    throw std::invalid_argument(
        "compute_metrics: need at least three full reference periods");
  }

  // Skip the first period, then trim to whole periods so the circular
  // cross-correlation sees an integer cycle count.
  const Eigen::Index skip = period;
  const Eigen::Index n_cycles = (rows - skip) / period;
  const Eigen::Index n = n_cycles * period;
  const Eigen::ArrayXd x = traj.x.segment(skip, n);
  const Eigen::ArrayXd x_d = traj.x_d.segment(skip, n);
  const Eigen::ArrayXd err = x_d - x;

  MetricsReport report;
  report.rms_error = std::sqrt(err.square().mean());
  report.peak_error = err.abs().maxCoeff();

  for (Eigen::Index c = 0; c < n_cycles; ++c) {
    const Eigen::ArrayXd seg = err.segment(c * period, period);
    report.cycles.push_back({int(c) + 1, std::sqrt(seg.square().mean()),
                             seg.abs().maxCoeff()});
  }

  // Phase lag: maximize sum_i x[(i + k) mod n] x_d[i] over one period of
  // shifts; positive k means x must be advanced to line up, i.e. it lags.
  const Eigen::ArrayXd xc = x - x.mean();
  const Eigen::ArrayXd dc = x_d - x_d.mean();
  double best_corr = -std::numeric_limits<double>::infinity();
  Eigen::Index best_k = 0;
  for (Eigen::Index k = -period / 2; k < period - period / 2; ++k) {
    double corr = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index j = i + k;
      if (j < 0) {
        j += n;
      } else if (j >= n) {
        j -= n;
      }
      corr += xc[j] * dc[i];
    }
    if (corr > best_corr) {
      best_corr = corr;
      best_k = k;
    }
  }
  double phase = 360.0 * f * double(best_k) * dt;
  if (phase <= -180.0) {
    phase += 360.0;
  } else if (phase > 180.0) {
    phase -= 360.0;
  }
  report.phase_lag_deg = phase;

  // Overshoot past the reference peak, as a percentage of the amplitude.
  const double bias = x_d.mean();
  const double amplitude = 0.5 * (x_d.maxCoeff() - x_d.minCoeff());
  if (amplitude > 0.0) {
    report.overshoot_pct =
        std::max(0.0, (x.maxCoeff() - bias) - amplitude) / amplitude * 100.0;
  }
  return report;
}

std::string format_metrics_report(const MetricsReport& report) {
  std::string out;
  out += "rms_error = " + format_full(report.rms_error) + " # m\n";
  out += "phase_lag = " + format_full(report.phase_lag_deg) + " # deg\n";
  out += "overshoot = " + format_full(report.overshoot_pct) + " # percent\n";
  out += "peak_error = " + format_full(report.peak_error) + " # m\n";
  out += "cycles = " + std::to_string(report.cycles.size()) + " # count\n";
  out += "# cycle,rms_error_m,peak_error_m\n";
  for (const CycleMetrics& c : report.cycles) {
    out += "# " + std::to_string(c.cycle) + "," + format_full(c.rms_error) +
           "," + format_full(c.peak_error) + "\n";
  }
  return out;
}

}  // namespace pma
