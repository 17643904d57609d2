// pmasim: batch experiment runner for the pneumatic-muscle toolkit.
//
// Subcommands: characterize, identify, track, compare, metrics.
// Exit codes: 0 success, 2 validation error, 3 numerical divergence.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "pma/runner.hpp"
#include "pma/scenario.hpp"
#include "pma/simulate.hpp"
#include "pma/version.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

struct CommonArgs {
  std::vector<std::string> scenarios;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, int n_scenarios) {
  cmd->add_option("--scenario", args.scenarios, "scenario file")
      ->required()
      ->expected(n_scenarios);
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--seed", args.seed, "override the scenario rng_seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

pma::RunOptions options_from(const CommonArgs& args) {
  pma::RunOptions options;
  options.out_dir = args.out_dir;
  if (args.seed_set) {
    options.seed_override = args.seed;
  }
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pneumatic muscle actuator simulation & control toolkit"};
  app.set_version_flag("--version", pma::kToolkitVersion);
  app.require_subcommand(1);

  CommonArgs characterize_args, identify_args, track_args, compare_args,
      metrics_args;
  std::string metrics_traj;

  CLI::App* characterize = app.add_subcommand(
      "characterize", "open-loop excitation run, writes the trajectory CSV");
  add_common(characterize, characterize_args, 1);

  CLI::App* identify = app.add_subcommand(
      "identify", "recover plant parameters from recorded or synthetic data");
  add_common(identify, identify_args, 1);

  CLI::App* track = app.add_subcommand(
      "track", "closed-loop tracking run, writes trajectory and metrics");
  add_common(track, track_args, 1);

  CLI::App* compare = app.add_subcommand(
      "compare", "run two tracking scenarios (pass --scenario twice: "
                 "feedback slot first, computed-torque slot second)");
  add_common(compare, compare_args, 2);

  CLI::App* metrics = app.add_subcommand(
      "metrics", "recompute tracking metrics for an existing trajectory CSV");
  add_common(metrics, metrics_args, 1);
  metrics->add_option("--traj", metrics_traj, "trajectory CSV to analyze")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (characterize->parsed()) {
      pma::run_characterize(characterize_args.scenarios[0],
                            options_from(characterize_args));
    } else if (identify->parsed()) {
      pma::run_identify(identify_args.scenarios[0],
                        options_from(identify_args));
    } else if (track->parsed()) {
      pma::run_track(track_args.scenarios[0], options_from(track_args));
    } else if (compare->parsed()) {
      pma::run_compare(compare_args.scenarios[0], compare_args.scenarios[1],
                       options_from(compare_args));
    } else if (metrics->parsed()) {
      pma::run_metrics(metrics_args.scenarios[0], metrics_traj,
                       options_from(metrics_args));
    }
  } catch (const pma::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDivergence;
  } catch (const pma::ScenarioError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
