#include "pma/control.hpp"

#include <cmath>
#include <vector>

namespace pma {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Exact tick divisor, rejecting rates that do not divide the parent rate.
Eigen::Index rate_divisor(double parent_rate, double rate, const char* what) {
  const double ratio = parent_rate / rate;
  const auto div = static_cast<Eigen::Index>(std::llround(ratio));
  if (div < 1 || std::abs(ratio - double(div)) > 1e-9) {
    throw std::invalid_argument(std::string(what) +
                                " must divide the simulation rate evenly");
  }
  return div;
}

}  // namespace

void ControllerConfig::validate(double sim_rate) const {
  if (!(std::isfinite(Kp) && std::isfinite(Ki) && std::isfinite(Kd))) {
    throw std::invalid_argument("controller: gains must be finite");
  }
  if (!(inner_rate > 0.0) || !(command_rate > 0.0)) {
    throw std::invalid_argument("controller: rates must be > 0");
  }
  if (inner_rate < command_rate) {
    throw std::invalid_argument(
        "controller: inner_rate must be >= command_rate");
  }
  if (!(integral_limit > 0.0)) {
    throw std::invalid_argument("controller: integral_limit must be > 0");
  }
  if (!(velocity_filter_cutoff >= 0.0)) {
    throw std::invalid_argument(
        "controller: velocity_filter_cutoff must be >= 0");
  }
  rate_divisor(sim_rate, inner_rate, "controller: inner_rate");
  rate_divisor(sim_rate, command_rate, "controller: command_rate");
}

void SensorModel::validate() const {
  if (!(resolution > 0.0)) {
    // resolution == 0 switches quantization off; negative makes no sense
    if (resolution != 0.0) {
      throw std::invalid_argument("sensor: resolution must be >= 0");
    }
  }
  if (latency < 0) {
    throw std::invalid_argument("sensor: latency must be >= 0");
  }
}

double SensorModel::quantize(double x_true) const {
  if (resolution == 0.0) {
    return x_true;
  }
  return std::floor(x_true / resolution) * resolution;
}

void RegulatorModel::validate() const {
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("regulator: tau must be >= 0");
  }
  if (!(p_min < p_max)) {
    throw std::invalid_argument("regulator: need p_min < p_max");
  }
}

double RegulatorModel::clamp(double p_cmd) const {
  return std::clamp(p_cmd, p_min, p_max);
}

VelocityEstimator::VelocityEstimator(double cutoff_hz, double dt, double v0)
    : pole_(cutoff_hz > 0.0 ? std::exp(-kTwoPi * cutoff_hz * dt) : 0.0),
      dt_(dt),
      v_hat_(v0) {}

double VelocityEstimator::update(double x_measured) {
  if (!primed_) {
    prev_x_ = x_measured;
    primed_ = true;
    return v_hat_;
  }
  const double raw = (x_measured - prev_x_) / dt_;
  prev_x_ = x_measured;
  v_hat_ = pole_ * v_hat_ + (1.0 - pole_) * raw;
  return v_hat_;
}

PidController::PidController(const ControllerConfig& cfg,
                             const RegulatorModel& reg)
    : cfg_(cfg), reg_(reg) {}

double PidController::step(double e, double e_dot, double dt) {
  const double u_raw = cfg_.Kp * e + cfg_.Ki * integral_ + cfg_.Kd * e_dot;
  const double u = reg_.clamp(u_raw);
  if (u == u_raw) {
    integral_ = std::clamp(integral_ + e * dt, -cfg_.integral_limit,
                           cfg_.integral_limit);
  }
  return u;
}

double hysteresis_observer_step(double v_hat, double z_hat,
                                const PlantParams& params_hat, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("hysteresis_observer_step: dt must be > 0");
  }
  const double k1 = bouc_wen_rate(v_hat, z_hat, params_hat);
  const double k2 = bouc_wen_rate(v_hat, z_hat + 0.5 * dt * k1, params_hat);
  const double k3 = bouc_wen_rate(v_hat, z_hat + 0.5 * dt * k2, params_hat);
  const double k4 = bouc_wen_rate(v_hat, z_hat + dt * k3, params_hat);
  return z_hat + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double computed_torque_step(double x_m, double v_hat, const RefPoint& ref,
                            double z_hat, const PlantParams& params_hat,
                            double Kp, double Kd, const RegulatorModel& reg,
                            double integral, double Ki) {
  const double a_cmd = ref.a_d + Kd * (ref.v_d - v_hat) +
                       Kp * (ref.x_d - x_m) + Ki * integral;
  const double mass = params_hat.total_mass();
  const double force = mass * a_cmd + mass * params_hat.g_signed +
                       params_hat.K_e * x_m + params_hat.d * v_hat + z_hat;
  return reg.clamp(force / params_hat.A + params_hat.p_dz);
}

ComputedTorqueController::ComputedTorqueController(
    const ControllerConfig& cfg, const PlantParams& model_hat,
    const RegulatorModel& reg, double z0)
    : cfg_(cfg), model_hat_(model_hat), reg_(reg), z_hat_(z0) {}

double ComputedTorqueController::step(double x_m, double v_hat,
                                      const RefPoint& ref, double dt) {
  const double u =
      computed_torque_step(x_m, v_hat, ref, z_hat_, model_hat_, cfg_.Kp,
                           cfg_.Kd, reg_, integral_, cfg_.Ki);
  z_hat_ = hysteresis_observer_step(v_hat, z_hat_, model_hat_, dt);
  integral_ = std::clamp(integral_ + (ref.x_d - x_m) * dt,
                         -cfg_.integral_limit, cfg_.integral_limit);
  return u;
}

Trajectory run_closed_loop(const ClosedLoopSetup& setup) {
  setup.clock.validate();
  setup.plant.validate();
  setup.model_hat.validate();
  setup.reference.validate();
  setup.sensor.validate();
  setup.regulator.validate();
  const double sim_rate = 1.0 / setup.clock.dt;
  setup.controller.validate(sim_rate);
  if (!setup.initial.all_finite()) {
    throw std::invalid_argument("run_closed_loop: non-finite initial state");
  }

  const Eigen::Index inner_div =
      rate_divisor(sim_rate, setup.controller.inner_rate, "inner_rate");
  const Eigen::Index cmd_div =
      rate_divisor(sim_rate, setup.controller.command_rate, "command_rate");
  const double inner_dt = setup.clock.dt * double(inner_div);
  const Eigen::Index n = setup.clock.n_steps();

  // Controller-side machinery. The velocity estimator starts at the
  // reference velocity, which the controller knows at t = 0.
  VelocityEstimator estimator(setup.controller.velocity_filter_cutoff,
                              inner_dt, setup.reference.eval(0.0).v_d);
  PidController pid(setup.controller, setup.regulator);
  ComputedTorqueController ct(setup.controller, setup.model_hat,
                              setup.regulator, setup.initial.z);
  // Latency line holds the most recent quantized samples.
  std::deque<double> delay_line;

  PlantState state = setup.initial;
  double u_latest = 0.0;
  double u_held = 0.0;
  double p_act = 0.0;  // regulator output (Pa)
  const double lag_gain =
      setup.regulator.tau > 0.0
          ? -std::expm1(-setup.clock.dt / setup.regulator.tau)
          : 1.0;

  Trajectory traj;
  traj.resize(n + 1, true);
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double t = k * setup.clock.dt;
    const RefPoint ref = setup.reference.eval(t);

    if (k % inner_div == 0) {
      double x_m = setup.sensor.quantize(state.x);
      if (setup.sensor.latency > 0) {
        delay_line.push_back(x_m);
        while (delay_line.size() > size_t(setup.sensor.latency) + 1) {
          delay_line.pop_front();
        }
        x_m = delay_line.front();
      }
      const double v_hat = estimator.update(x_m);
      if (setup.controller.mode == ControlMode::pid) {
        u_latest = pid.step(ref.x_d - x_m, ref.v_d - v_hat, inner_dt);
      } else {
        u_latest = ct.step(x_m, v_hat, ref, inner_dt);
      }
    }
    if (k % cmd_div == 0) {
      u_held = setup.regulator.clamp(u_latest);
      if (setup.regulator.tau == 0.0) {
        p_act = u_held;
      }
    }

    traj.t[k] = t;
    traj.p_cmd[k] = u_held;
    traj.p_eff[k] = effective_pressure(p_act, setup.plant);
    traj.x[k] = state.x;
    traj.v[k] = state.v;
    traj.z[k] = state.z;
    traj.x_d[k] = ref.x_d;
    traj.v_d[k] = ref.v_d;
    traj.e[k] = ref.x_d - state.x;

    if (k == n) {
      break;
    }
    try {
      state = step_rk4(state, traj.p_eff[k], setup.plant, setup.clock.dt);
    } catch (const DivergenceError&) {
      throw DivergenceError((k + 1) * setup.clock.dt);
    }
    p_act += lag_gain * (u_held - p_act);
  }
  return traj;
}

}  // namespace pma
