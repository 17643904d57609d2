#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "pma/control.hpp"
#include "pma/identify.hpp"
#include "pma/model.hpp"
#include "pma/signals.hpp"
#include "pma/simulate.hpp"

namespace pma {

/// Parse or validation failure; the message carries file:line context.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How identification runs obtain their recorded data: either replayed
/// from a trajectory CSV or synthesized from the scenario's plant and
/// signal blocks with per-run measurement noise.
struct IdentificationSpec {
  std::string data_csv;         // empty -> synthetic
  int synthetic_runs = 10;
  double noise_sigma = 0.0;     // m, Gaussian, per sample
  ParameterBounds bounds = ParameterBounds::defaults();
  int n_starts = 20;
  double sim_dt = 0.0;          // 0 -> recorded grid spacing
};

/// One declarative experiment: a plant, an excitation or reference, and
/// the blocks the run type needs. Unused blocks may be omitted in the file
/// and stay at their defaults here.
struct Scenario {
  std::string name;
  PlantParams plant;
  std::optional<PlantParams> model;  // controller's model; plant if absent
  std::optional<PressureSignal> signal;
  std::optional<ReferenceSignal> reference;
  std::optional<ControllerConfig> controller;
  SensorModel sensor;
  RegulatorModel regulator;
  SimClock clock;
  PlantState initial;
  std::uint64_t rng_seed = 0;
  std::optional<IdentificationSpec> identification;

  PlantParams controller_model() const { return model ? *model : plant; }
};

/// Parses and validates a scenario file. The format is line-based:
/// `[section]` headers, `key = value` entries, `#` comments; keys carry
/// their unit as a suffix (e.g. K_e_N_per_m). Unknown sections or keys,
/// duplicate keys and out-of-range values all raise ScenarioError with the
/// offending line number.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace pma
