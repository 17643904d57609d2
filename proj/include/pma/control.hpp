#pragma once

#include <cstdint>
#include <deque>
#include <limits>

#include "pma/model.hpp"
#include "pma/signals.hpp"
#include "pma/simulate.hpp"

namespace pma {

enum class ControlMode { pid, computed_torque };

/// Gains and loop timing. PID gains map extension error to pressure
/// (Kp: Pa/m, Ki: Pa/(m s), Kd: Pa s/m); computed-torque gains act at the
/// acceleration level (Kp: 1/s^2, Ki: 1/s^3, Kd: 1/s).
struct ControllerConfig {
  ControlMode mode = ControlMode::pid;
  double Kp = 0.0;
  double Ki = 0.0;
  double Kd = 0.0;
  double inner_rate = 100.0;    // controller update rate (Hz)
  double command_rate = 20.0;   // regulator command refresh rate (Hz)
  double integral_limit = std::numeric_limits<double>::infinity();
  double velocity_filter_cutoff = 20.0;  // Hz; 0 disables the filter

  void validate(double sim_rate) const;
};

/// Incremental optical encoder: measurements snap to multiples of the
/// resolution; latency delays them by whole controller ticks.
struct SensorModel {
  double resolution = 0.0254 / 2000.0;  // m per count (2000 counts per inch)
  int latency = 0;                      // controller ticks

  void validate() const;
  double quantize(double x_true) const;
};

/// Proportional pressure regulator: command saturation plus a first-order
/// lag of time constant tau (tau = 0 responds instantly).
struct RegulatorModel {
  double tau = 0.05;      // s
  double p_min = 0.0;     // Pa
  double p_max = 0.9e6;   // Pa

  void validate() const;
  double clamp(double p_cmd) const;
};

/// Finite-difference velocity estimate smoothed by a first-order low-pass.
/// A cutoff of 0 passes the raw difference through.
class VelocityEstimator {
 public:
  VelocityEstimator(double cutoff_hz, double dt, double v0 = 0.0);
  double update(double x_measured);
  double estimate() const { return v_hat_; }

 private:
  double pole_;
  double dt_;
  double v_hat_;
  double prev_x_ = 0.0;
  bool primed_ = false;
};

/// Joint-space PID on the extension error with conditional integration:
/// the integral state is held while the output saturates, and clamped to
/// +/- integral_limit.
class PidController {
 public:
  PidController(const ControllerConfig& cfg, const RegulatorModel& reg);

  /// e is the position error (m), e_dot its derivative (m/s) supplied by
  /// the caller from the reference velocity and the velocity estimate.
  double step(double e, double e_dot, double dt);
  double integral() const { return integral_; }

 private:
  ControllerConfig cfg_;
  RegulatorModel reg_;
  double integral_ = 0.0;
};

/// Open-loop copy of the hysteresis state driven by the estimated velocity,
/// advanced one RK4 step with v_hat held constant.
double hysteresis_observer_step(double v_hat, double z_hat,
                                const PlantParams& params_hat, double dt);

/// Model-inverting pressure command:
///   a_cmd = a_d + Kd (v_d - v_hat) + Kp (x_d - x_m) [+ Ki integral]
///   p_cmd = [(M+m)(a_cmd + g_signed) + K_e x_m + d v_hat + z_hat] / A + p_dz
/// clamped to the regulator range.
double computed_torque_step(double x_m, double v_hat, const RefPoint& ref,
                            double z_hat, const PlantParams& params_hat,
                            double Kp, double Kd, const RegulatorModel& reg,
                            double integral = 0.0, double Ki = 0.0);

/// Computed-torque controller owning the hysteresis observer state and the
/// optional integral term.
class ComputedTorqueController {
 public:
  ComputedTorqueController(const ControllerConfig& cfg,
                           const PlantParams& model_hat,
                           const RegulatorModel& reg, double z0 = 0.0);

  double step(double x_m, double v_hat, const RefPoint& ref, double dt);
  double z_hat() const { return z_hat_; }

 private:
  ControllerConfig cfg_;
  PlantParams model_hat_;
  RegulatorModel reg_;
  double z_hat_;
  double integral_ = 0.0;
};

/// Everything one tracking run needs. model_hat is the controller's plant
/// model; setting it equal to plant gives the perfect-model case.
struct ClosedLoopSetup {
  PlantParams plant;
  PlantParams model_hat;
  ControllerConfig controller;
  ReferenceSignal reference;
  SensorModel sensor;
  RegulatorModel regulator;
  SimClock clock;
  PlantState initial;
};

/// Dual-rate tracking loop: the plant integrates on the clock grid, the
/// sensor and controller update at inner_rate, and the regulator command
/// refreshes at command_rate with a zero-order hold in between. Returns the
/// trajectory with reference columns attached; p_cmd records the held
/// command and p_eff the lagged, dead-zoned pressure the plant felt.
Trajectory run_closed_loop(const ClosedLoopSetup& setup);

}  // namespace pma
