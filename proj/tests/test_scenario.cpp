#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "pma/scenario.hpp"

using namespace pma;

namespace {

namespace fs = std::filesystem;

fs::path write_temp_scenario(const std::string& stem,
                             const std::string& body) {
  const fs::path path = fs::temp_directory_path() / (stem + ".scenario");
  std::ofstream out(path, std::ios::trunc);
  out << body;
  out.close();
  return path;
}

const std::string kMinimalPlant =
    "[plant]\n"
    "M_kg = 0.045\n"
    "m_kg = 0.022\n"
    "K_e_N_per_m = 624.78\n"
    "d_N_s_per_m = 155.76\n"
    "g_signed_m_per_s2 = -9.81\n"
    "A_m2 = 2.1189683585006908e-04\n"
    "p_dz_Pa = 66922\n"
    "p_max_Pa = 900000\n"
    "alpha_N_per_m = 23.705\n"
    "beta_per_m = 1.7267\n"
    "gamma_per_m = -42.593\n";

void check_error_contains(const fs::path& path, const std::string& needle) {
  try {
    load_scenario(path);
    FAIL("expected ScenarioError for ", path.string());
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
  fs::remove(path);
}

}  // namespace

TEST_CASE("shipped scenarios parse and carry the expected blocks") {
  const fs::path dir = PMA_SCENARIO_DIR;

  const Scenario characterize = load_scenario(dir / "characterize.scenario");
  CHECK(characterize.name == "characterize");
  REQUIRE(characterize.signal.has_value());
  CHECK(characterize.signal->kind == SignalKind::chirp);
  CHECK(characterize.signal->f1 == 3.0);
  CHECK(characterize.clock.t_end == 15.0);
  CHECK(characterize.plant.K_e == 624.78);
  CHECK(characterize.plant.g_signed == -9.81);
  CHECK(!characterize.controller.has_value());

  const Scenario track = load_scenario(dir / "track_ct_0p5hz.scenario");
  REQUIRE(track.controller.has_value());
  CHECK(track.controller->mode == ControlMode::computed_torque);
  CHECK(track.controller->inner_rate == 100.0);
  CHECK(track.controller->command_rate == 20.0);
  REQUIRE(track.reference.has_value());
  CHECK(track.reference->amplitude == 0.0225);
  CHECK(track.sensor.resolution == 1.27e-5);
  CHECK(track.regulator.tau == 0.05);

  const Scenario ident = load_scenario(dir / "identify_synthetic.scenario");
  REQUIRE(ident.identification.has_value());
  CHECK(ident.identification->synthetic_runs == 10);
  CHECK(ident.identification->n_starts == 20);
  CHECK(ident.identification->noise_sigma == 1e-4);
  CHECK(ident.identification->bounds.lo[kAlpha] ==
        doctest::Approx(23.705 * 0.5));
  CHECK(ident.rng_seed == 20220713);
}

TEST_CASE("a negative stiffness is rejected with its field and line") {
  const fs::path path = write_temp_scenario(
      "pma_bad_ke", "name = bad\n[plant]\nK_e_N_per_m = -624.78\n");
  try {
    load_scenario(path);
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("K_e_N_per_m") != std::string::npos);
    CHECK(msg.find(":3:") != std::string::npos);  // the offending line
  }
  fs::remove(path);
}

TEST_CASE("parse errors carry line numbers") {
  check_error_contains(
      write_temp_scenario("pma_dup", "name = a\nname = b\n"), ":2:");
  check_error_contains(
      write_temp_scenario("pma_noeq", "name = a\n[plant]\njust words\n"),
      ":3:");
  check_error_contains(
      write_temp_scenario("pma_badsec", "name = a\n[plant\n"), ":2:");
  check_error_contains(
      write_temp_scenario("pma_badnum",
                          "name = a\n[clock]\ndt_s = fast\n"),
      "finite number");
}

TEST_CASE("unknown sections and keys are rejected") {
  check_error_contains(
      write_temp_scenario("pma_badkey",
                          "name = a\n[plant]\nK_e_lbs_per_ft = 5\n"),
      "unknown key");
  check_error_contains(
      write_temp_scenario("pma_badsec2", "name = a\n[engine]\nrpm = 9\n"),
      "unknown section");
  // Gain keys carry mode-specific units; the wrong set is unknown.
  check_error_contains(
      write_temp_scenario("pma_wrongmode",
                          "name = a\n[clock]\nt_end_s = 20\n"
                          "[reference]\nf_Hz = 0.5\n"
                          "[controller]\nmode = computed_torque\n"
                          "Kp_Pa_per_m = 1e6\n"),
      "unknown key");
}

TEST_CASE("missing required keys are reported") {
  check_error_contains(write_temp_scenario("pma_noname", "[plant]\n"),
                       "missing required key 'name'");
  check_error_contains(
      write_temp_scenario("pma_nokind", "name = a\n[signal]\noffset_Pa = 1\n"),
      "missing required key 'kind'");
  check_error_contains(
      write_temp_scenario("pma_badname", "name = ../sneaky\n"),
      "not a valid filename stem");
}

TEST_CASE("the model block starts from the plant and overrides fields") {
  const fs::path path = write_temp_scenario(
      "pma_model_override",
      "name = a\n" + kMinimalPlant + "[model]\nK_e_N_per_m = 700\n");
  const Scenario s = load_scenario(path);
  fs::remove(path);
  REQUIRE(s.model.has_value());
  CHECK(s.model->K_e == 700.0);
  CHECK(s.model->alpha == s.plant.alpha);
  CHECK(s.controller_model().K_e == 700.0);

  const fs::path plain = write_temp_scenario(
      "pma_model_default", "name = a\n" + kMinimalPlant);
  const Scenario t = load_scenario(plain);
  fs::remove(plain);
  CHECK(!t.model.has_value());
  CHECK(t.controller_model().K_e == t.plant.K_e);
}

TEST_CASE("controller rates must divide the solver rate") {
  check_error_contains(
      write_temp_scenario("pma_badrate",
                          "name = a\n[clock]\ndt_s = 0.001\nt_end_s = 20\n"
                          "[reference]\nf_Hz = 0.5\n"
                          "[controller]\nmode = pid\nKp_Pa_per_m = 1e6\n"
                          "inner_rate_Hz = 333\n"),
      "divide the simulation rate");
}

TEST_CASE("comments, blank lines, and defaults work together") {
  const fs::path path = write_temp_scenario(
      "pma_defaults",
      "# top comment\n"
      "name = defaults-check   # trailing comment\n"
      "\n"
      "[clock]\n"
      "t_end_s = 2\n");
  const Scenario s = load_scenario(path);
  fs::remove(path);
  CHECK(s.name == "defaults-check");
  CHECK(s.clock.dt == 0.001);      // default solver step
  CHECK(s.plant.alpha == 23.705);  // default plant
  CHECK(s.sensor.resolution == SensorModel{}.resolution);
  CHECK(s.regulator.p_max == 0.9e6);
  CHECK(s.rng_seed == 0);
}
