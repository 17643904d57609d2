#include "pma/simulate.hpp"

#include <string>

namespace pma {

namespace {

std::string divergence_message(double t) {
  if (std::isnan(t)) {
    return "integration diverged";
  }
  return "integration diverged at t = " + std::to_string(t) + " s";
}

Vec3 rk4_increment(const Vec3& s, double p_eff, const PlantParams& params,
                   double dt) {
  const Vec3 k1 = dynamics_rhs<double>(s, p_eff, params);
  const Vec3 k2 = dynamics_rhs<double>(Vec3(s + 0.5 * dt * k1), p_eff, params);
  const Vec3 k3 = dynamics_rhs<double>(Vec3(s + 0.5 * dt * k2), p_eff, params);
  const Vec3 k4 = dynamics_rhs<double>(Vec3(s + dt * k3), p_eff, params);
  return dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

DivergenceError::DivergenceError(double t)
    : std::runtime_error(divergence_message(t)), t_(t) {}

double Trajectory::grid_dt() const {
  if (rows() < 2) {
    throw std::invalid_argument("Trajectory: need at least two samples");
  }
  return t[1] - t[0];
}

void Trajectory::resize(Eigen::Index n, bool with_reference) {
  t.resize(n);
  p_cmd.resize(n);
  p_eff.resize(n);
  x.resize(n);
  v.resize(n);
  z.resize(n);
  const Eigen::Index nref = with_reference ? n : 0;
  x_d.resize(nref);
  v_d.resize(nref);
  e.resize(nref);
}

PlantState step_rk4(const PlantState& state, double p_eff,
                    const PlantParams& params, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_rk4: dt must be > 0");
  }
  const Vec3 s = state.vec();
  Vec3 next;
  try {
    next = s + rk4_increment(s, p_eff, params, dt);
  } catch (const std::domain_error&) {
    // A stage state left the finite range mid-step.
    throw DivergenceError();
  }
  if (!next.allFinite()) {
    throw DivergenceError();
  }
  return PlantState::from_vec(next);
}

Trajectory simulate(const PlantState& initial, const PressureSignal& pressure,
                    const PlantParams& params, const SimClock& clock) {
  clock.validate();
  params.validate();
  pressure.validate();
  const Eigen::Index n = clock.n_steps();
  Eigen::ArrayXd p_cmd(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) {
    p_cmd[k] = pressure.value(k * clock.dt);
  }
  return simulate_recorded(initial, p_cmd, clock.dt, params);
}

Trajectory simulate_recorded(const PlantState& initial,
                             const Eigen::Ref<const Eigen::ArrayXd>& p_cmd,
                             double grid_dt, const PlantParams& params,
                             int substeps) {
  if (p_cmd.size() < 2) {
    throw std::invalid_argument("simulate_recorded: need at least two samples");
  }
  if (!(grid_dt > 0.0) || substeps < 1) {
    throw std::invalid_argument("simulate_recorded: bad grid_dt or substeps");
  }
  if (!initial.all_finite()) {
    throw std::invalid_argument("simulate_recorded: non-finite initial state");
  }
  const Eigen::Index n = p_cmd.size() - 1;
  const double dt = grid_dt / substeps;

  Trajectory traj;
  traj.resize(n + 1, false);
  PlantState state = initial;
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double t_k = k * grid_dt;
    const double eff = effective_pressure(p_cmd[k], params);
    traj.t[k] = t_k;
    traj.p_cmd[k] = p_cmd[k];
    traj.p_eff[k] = eff;
    traj.x[k] = state.x;
    traj.v[k] = state.v;
    traj.z[k] = state.z;
    if (k == n) {
      break;
    }
    try {
      for (int s = 0; s < substeps; ++s) {
        state = step_rk4(state, eff, params, dt);
      }
    } catch (const DivergenceError&) {
      throw DivergenceError((k + 1) * grid_dt);
    }
  }
  return traj;
}

}  // namespace pma
