// pma_tune: gain grid search for tracking scenarios.
//
// Sweeps controller gains on top of a track scenario and reports the
// combinations with the lowest RMS tracking error. The winners get frozen
// into the shipped scenario files so comparisons stay reproducible.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "pma/control.hpp"
#include "pma/metrics.hpp"
#include "pma/runner.hpp"
#include "pma/scenario.hpp"

namespace {

struct Candidate {
  double Kp, Ki, Kd;
  double rms;
  double phase;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid search for tracking gains"};
  std::string scenario_path;
  int top = 10;
  app.add_option("--scenario", scenario_path, "track scenario to tune")
      ->required();
  app.add_option("--top", top, "how many candidates to print");
  CLI11_PARSE(app, argc, argv);

  pma::Scenario scenario = pma::load_scenario(scenario_path);
  if (!scenario.controller || !scenario.reference) {
    std::fprintf(stderr, "scenario needs [controller] and [reference]\n");
    return 2;
  }

  std::vector<double> kp_grid, ki_grid, kd_grid;
  if (scenario.controller->mode == pma::ControlMode::pid) {
    kp_grid = {2e6, 4e6, 8e6, 1.6e7, 3.2e7, 6.4e7, 1.28e8, 2.56e8};
    ki_grid = {0.0, 4e6, 1.6e7, 6.4e7, 2.56e8, 1.024e9};
    kd_grid = {0.0, 4e4, 1.6e5, 6.4e5, 2.56e6};
  } else {
    kp_grid = {900, 1600, 2500, 3600, 4900, 6400, 10000};
    ki_grid = {0.0};
    kd_grid = {40, 60, 80, 120, 160, 240, 320};
  }

  std::vector<Candidate> results;
  for (double kp : kp_grid) {
    for (double ki : ki_grid) {
      for (double kd : kd_grid) {
        pma::Scenario s = scenario;
        s.controller->Kp = kp;
        s.controller->Ki = ki;
        s.controller->Kd = kd;
        try {
          const pma::Trajectory traj = pma::run_tracking(s);
          const pma::MetricsReport m =
              pma::compute_metrics(traj, s.reference->f);
          results.push_back({kp, ki, kd, m.rms_error, m.phase_lag_deg});
        } catch (const pma::DivergenceError&) {
          // unstable combination; skip
        }
      }
    }
  }
  if (results.empty()) {
    std::fprintf(stderr, "every combination diverged\n");
    return 1;
  }
  std::sort(results.begin(), results.end(),
            [](const Candidate& a, const Candidate& b) { return a.rms < b.rms; });
  std::printf("%-12s %-12s %-12s %-14s %s\n", "Kp", "Ki", "Kd", "rms (m)",
              "phase (deg)");
  for (int i = 0; i < std::min<int>(top, int(results.size())); ++i) {
    const Candidate& c = results[size_t(i)];
    std::printf("%-12g %-12g %-12g %-14.6g %.2f\n", c.Kp, c.Ki, c.Kd, c.rms,
                c.phase);
  }
  return 0;
}
