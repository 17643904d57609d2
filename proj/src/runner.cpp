#include "pma/runner.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pma/control.hpp"
#include "pma/csv.hpp"
#include "pma/random.hpp"
#include "pma/version.hpp"

namespace pma {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t apply_seed(const Scenario& scenario, const RunOptions& options) {
  return options.seed_override.value_or(scenario.rng_seed);
}

void copy_scenario(const fs::path& scenario_path, const fs::path& out_dir,
                   const std::string& as) {
  write_file_atomic(out_dir / as, read_file(scenario_path));
}

void write_manifest(const RunOptions& options, const std::string& subcommand,
                    const std::vector<fs::path>& scenarios,
                    std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json m;
  m["toolkit_version"] = kToolkitVersion;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  if (scenarios.size() == 1) {
    m["scenario"] = scenarios[0].filename().string();
    m["scenario_fnv1a64"] = file_fnv1a64(scenarios[0]);
  } else {
    json list = json::array();
    for (const fs::path& s : scenarios) {
      list.push_back({{"file", s.filename().string()},
                      {"fnv1a64", file_fnv1a64(s)}});
    }
    m["scenarios"] = list;
  }
  m["outputs"] = outputs;
  write_file_atomic(options.out_dir / "manifest.json", m.dump(2) + "\n");
}

void require(bool ok, const std::string& msg) {
  if (!ok) {
    throw ScenarioError(msg);
  }
}

// A malformed input trajectory is a validation failure, not an internal one.
Trajectory read_recorded_csv(const fs::path& path) {
  try {
    return read_trajectory_csv(path);
  } catch (const std::runtime_error& e) {
    throw ScenarioError(e.what());
  }
}

// Runs the open-loop characterization simulation of a scenario.
Trajectory run_open_loop(const Scenario& scenario) {
  require(scenario.signal.has_value(),
          scenario.name + ": a [signal] block is required");
  scenario.clock.validate();
  return simulate(scenario.initial, *scenario.signal, scenario.plant,
                  scenario.clock);
}

void check_shared_blocks(const Scenario& a, const Scenario& b) {
  auto same = [](double x, double y) { return x == y; };
  const PlantParams &pa = a.plant, &pb = b.plant;
  const bool plant_ok =
      same(pa.M, pb.M) && same(pa.m, pb.m) && same(pa.K_e, pb.K_e) &&
      same(pa.d, pb.d) && same(pa.g_signed, pb.g_signed) && same(pa.A, pb.A) &&
      same(pa.p_dz, pb.p_dz) && same(pa.p_max, pb.p_max) &&
      same(pa.alpha, pb.alpha) && same(pa.beta, pb.beta) &&
      same(pa.gamma, pb.gamma);
  require(plant_ok, "compare: scenarios disagree on the [plant] block");
  require(a.reference.has_value() && b.reference.has_value(),
          "compare: both scenarios need a [reference] block");
  require(same(a.reference->bias, b.reference->bias) &&
              same(a.reference->amplitude, b.reference->amplitude) &&
              same(a.reference->f, b.reference->f),
          "compare: scenarios disagree on the [reference] block");
  require(same(a.sensor.resolution, b.sensor.resolution) &&
              a.sensor.latency == b.sensor.latency,
          "compare: scenarios disagree on the [sensor] block");
  require(same(a.regulator.tau, b.regulator.tau) &&
              same(a.regulator.p_min, b.regulator.p_min) &&
              same(a.regulator.p_max, b.regulator.p_max),
          "compare: scenarios disagree on the [regulator] block");
  require(same(a.clock.dt, b.clock.dt) && same(a.clock.t_end, b.clock.t_end),
          "compare: scenarios disagree on the [clock] block");
}

}  // namespace

Trajectory run_tracking(const Scenario& scenario) {
  require(scenario.reference.has_value(),
          scenario.name + ": a [reference] block is required");
  require(scenario.controller.has_value(),
          scenario.name + ": a [controller] block is required");
  ClosedLoopSetup setup;
  setup.plant = scenario.plant;
  setup.model_hat = scenario.controller_model();
  setup.controller = *scenario.controller;
  setup.reference = *scenario.reference;
  setup.sensor = scenario.sensor;
  setup.regulator = scenario.regulator;
  setup.clock = scenario.clock;
  setup.initial = scenario.initial;
  return run_closed_loop(setup);
}

IdentificationProblem build_identification_problem(const Scenario& scenario,
                                                   const fs::path& dir) {
  require(scenario.identification.has_value(),
          scenario.name + ": an [identification] block is required");
  const IdentificationSpec& spec = *scenario.identification;

  IdentificationProblem problem;
  problem.fixed = scenario.plant;
  problem.bounds = spec.bounds;
  problem.n_starts = spec.n_starts;
  problem.rng_seed = scenario.rng_seed;
  problem.sim_dt = spec.sim_dt;
  problem.initial_state = scenario.initial;

  if (!spec.data_csv.empty()) {
    const fs::path data = fs::path(spec.data_csv).is_absolute()
                              ? fs::path(spec.data_csv)
                              : dir / spec.data_csv;
    const Trajectory recorded = read_recorded_csv(data);
    problem.t = recorded.t;
    problem.p_cmd = recorded.p_cmd;
    problem.x_meas = recorded.x;
  } else {
    const Trajectory truth = run_open_loop(scenario);
    std::vector<Trajectory> runs(size_t(spec.synthetic_runs), truth);
    // A stream separate from the optimizer's start sampling.
    GaussianSampler noise(scenario.rng_seed ^ 0x6e6f697365ULL);
    for (Trajectory& run : runs) {
      for (Eigen::Index i = 0; i < run.rows(); ++i) {
        run.x[i] += spec.noise_sigma * noise();
      }
    }
    const Trajectory mean = average_response(runs);
    problem.t = mean.t;
    problem.p_cmd = mean.p_cmd;
    problem.x_meas = mean.x;
  }
  problem.validate();
  return problem;
}

void run_characterize(const fs::path& scenario_path,
                      const RunOptions& options) {
  Scenario scenario = load_scenario(scenario_path);
  scenario.rng_seed = apply_seed(scenario, options);
  const Trajectory traj = run_open_loop(scenario);
  write_trajectory_csv(traj, options.out_dir / "trajectory.csv");
  copy_scenario(scenario_path, options.out_dir, "scenario.used");
  write_manifest(options, "characterize", {scenario_path}, scenario.rng_seed,
                 {"trajectory.csv", "scenario.used"});
}

void run_identify(const fs::path& scenario_path, const RunOptions& options) {
  Scenario scenario = load_scenario(scenario_path);
  scenario.rng_seed = apply_seed(scenario, options);
  const IdentificationProblem problem =
      build_identification_problem(scenario, scenario_path.parent_path());

  Trajectory recorded;
  recorded.resize(problem.t.size(), false);
  recorded.t = problem.t;
  recorded.p_cmd = problem.p_cmd;
  recorded.p_eff = Eigen::ArrayXd::Zero(problem.t.size());
  recorded.x = problem.x_meas;
  recorded.v = Eigen::ArrayXd::Zero(problem.t.size());
  recorded.z = Eigen::ArrayXd::Zero(problem.t.size());
  write_trajectory_csv(recorded, options.out_dir / "recorded.csv");

  const IdentificationResult result = identify(problem);
  write_file_atomic(options.out_dir / "identified_params.txt",
                    format_identification_result(result, problem));
  write_file_atomic(options.out_dir / "starts.csv",
                    format_start_table(result));
  copy_scenario(scenario_path, options.out_dir, "scenario.used");
  write_manifest(options, "identify", {scenario_path}, scenario.rng_seed,
                 {"identified_params.txt", "starts.csv", "recorded.csv",
                  "scenario.used"});
}

void run_track(const fs::path& scenario_path, const RunOptions& options) {
  Scenario scenario = load_scenario(scenario_path);
  scenario.rng_seed = apply_seed(scenario, options);
  const Trajectory traj = run_tracking(scenario);
  write_trajectory_csv(traj, options.out_dir / "trajectory.csv");
  const MetricsReport report = compute_metrics(traj, scenario.reference->f);
  write_file_atomic(options.out_dir / "metrics.txt",
                    format_metrics_report(report));
  copy_scenario(scenario_path, options.out_dir, "scenario.used");
  write_manifest(options, "track", {scenario_path}, scenario.rng_seed,
                 {"trajectory.csv", "metrics.txt", "scenario.used"});
}

void run_compare(const fs::path& scenario_fb, const fs::path& scenario_ct,
                 const RunOptions& options) {
  Scenario fb = load_scenario(scenario_fb);
  Scenario ct = load_scenario(scenario_ct);
  fb.rng_seed = apply_seed(fb, options);
  ct.rng_seed = apply_seed(ct, options);
  check_shared_blocks(fb, ct);

  const Trajectory traj_fb = run_tracking(fb);
  const Trajectory traj_ct = run_tracking(ct);
  const double f = fb.reference->f;
  const MetricsReport m_fb = compute_metrics(traj_fb, f);
  const MetricsReport m_ct = compute_metrics(traj_ct, f);

  std::string csv = "t,x_d,x_FB,x_CT,e_FB,e_CT\n";
  for (Eigen::Index k = 0; k < traj_fb.rows(); ++k) {
    csv += format_full(traj_fb.t[k]) + ',' + format_full(traj_fb.x_d[k]) +
           ',' + format_full(traj_fb.x[k]) + ',' + format_full(traj_ct.x[k]) +
           ',' + format_full(traj_fb.e[k]) + ',' + format_full(traj_ct.e[k]) +
           '\n';
  }
  write_file_atomic(options.out_dir / "comparison.csv", csv);

  std::string table = "metric,FB,CT,unit\n";
  table += "rms_error," + format_full(m_fb.rms_error) + ',' +
           format_full(m_ct.rms_error) + ",m\n";
  table += "phase_lag," + format_full(m_fb.phase_lag_deg) + ',' +
           format_full(m_ct.phase_lag_deg) + ",deg\n";
  table += "overshoot," + format_full(m_fb.overshoot_pct) + ',' +
           format_full(m_ct.overshoot_pct) + ",percent\n";
  table += "peak_error," + format_full(m_fb.peak_error) + ',' +
           format_full(m_ct.peak_error) + ",m\n";
  write_file_atomic(options.out_dir / "compare.txt", table);
  write_file_atomic(options.out_dir / "metrics_fb.txt",
                    format_metrics_report(m_fb));
  write_file_atomic(options.out_dir / "metrics_ct.txt",
                    format_metrics_report(m_ct));
  copy_scenario(scenario_fb, options.out_dir, "scenario_fb.used");
  copy_scenario(scenario_ct, options.out_dir, "scenario_ct.used");
  write_manifest(options, "compare", {scenario_fb, scenario_ct}, fb.rng_seed,
                 {"comparison.csv", "compare.txt", "metrics_fb.txt",
                  "metrics_ct.txt", "scenario_fb.used", "scenario_ct.used"});
}

void run_metrics(const fs::path& scenario_path, const fs::path& trajectory_csv,
                 const RunOptions& options) {
  Scenario scenario = load_scenario(scenario_path);
  scenario.rng_seed = apply_seed(scenario, options);
  require(scenario.reference.has_value(),
          scenario.name + ": a [reference] block is required");
  const Trajectory traj = read_recorded_csv(trajectory_csv);
  require(traj.has_reference(),
          trajectory_csv.string() + ": trajectory has no reference columns");
  const MetricsReport report = compute_metrics(traj, scenario.reference->f);
  write_file_atomic(options.out_dir / "metrics.txt",
                    format_metrics_report(report));
  copy_scenario(scenario_path, options.out_dir, "scenario.used");
  write_manifest(options, "metrics", {scenario_path}, scenario.rng_seed,
                 {"metrics.txt", "scenario.used"});
}

std::string file_fnv1a64(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pma
