#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

#include "pma/model.hpp"
#include "pma/signals.hpp"

namespace pma {

/// Fixed-step clock of the real-time solve: 1 kHz by default.
struct SimClock {
  double dt = 1e-3;    // step (s)
  double t_end = 0.0;  // duration (s)

  Eigen::Index n_steps() const {
    return static_cast<Eigen::Index>(std::llround(t_end / dt));
  }
  void validate() const {
    if (!(std::isfinite(dt) && dt > 0.0)) {
      throw std::invalid_argument("SimClock: dt must be > 0");
    }
    if (!(std::isfinite(t_end) && t_end > 0.0)) {
      throw std::invalid_argument("SimClock: t_end must be > 0");
    }
  }
};

/// Raised when the state leaves the finite range; carries the simulation
/// time of the failing step when known (NaN otherwise).
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(double t = std::nan(""));
  double time() const { return t_; }

 private:
  double t_;
};

/// Uniformly sampled run: one row per step plus the endpoint. The reference
/// columns are filled by closed-loop runs only and stay empty otherwise.
struct Trajectory {
  Eigen::ArrayXd t;      // s
  Eigen::ArrayXd p_cmd;  // commanded pressure (Pa)
  Eigen::ArrayXd p_eff;  // pressure past saturation and dead zone (Pa)
  Eigen::ArrayXd x;      // extension (m)
  Eigen::ArrayXd v;      // velocity (m/s)
  Eigen::ArrayXd z;      // hysteresis force (N)
  Eigen::ArrayXd x_d;    // reference extension (m), closed loop only
  Eigen::ArrayXd v_d;    // reference velocity (m/s), closed loop only
  Eigen::ArrayXd e;      // tracking error x_d - x (m), closed loop only

  Eigen::Index rows() const { return t.size(); }
  bool has_reference() const { return x_d.size() != 0; }
  double grid_dt() const;
  void resize(Eigen::Index n, bool with_reference);
};

/// One classical RK4 step under zero-order-held effective pressure.
/// Deterministic; throws DivergenceError if the result is not finite.
PlantState step_rk4(const PlantState& state, double p_eff,
                    const PlantParams& params, double dt);

/// Integrates the plant under the signal sampled on the clock grid, with
/// the dead zone applied each step. Samples at t_k = k dt including the
/// endpoint, so a run of t_end = N dt yields N + 1 rows.
Trajectory simulate(const PlantState& initial, const PressureSignal& pressure,
                    const PlantParams& params, const SimClock& clock);

/// Same integration driven by a recorded command sequence on a uniform grid
/// of spacing grid_dt. p_cmd[k] is held over [k grid_dt, (k+1) grid_dt);
/// substeps > 1 refines the integrator step to grid_dt / substeps while
/// sampling stays on the grid.
Trajectory simulate_recorded(const PlantState& initial,
                             const Eigen::Ref<const Eigen::ArrayXd>& p_cmd,
                             double grid_dt, const PlantParams& params,
                             int substeps = 1);

}  // namespace pma
