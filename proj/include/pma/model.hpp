#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace pma {

using Vec3 = Eigen::Vector3d;

/// Parameters of the single-DOF pneumatic muscle plant
///
///   (M + m) x'' + (M + m) g + K_e x + d x' + z = A p_eff
///   z' = x' [alpha - (beta sgn(x' z) + gamma) |z|]
///
/// z carries newtons, so dimensional consistency puts alpha in N/m and
/// beta, gamma in 1/m. They are stored as plain scalars.
struct PlantParams {
  double M = 0.045;         // load / carriage mass (kg)
  double m = 0.022;         // PMA mass (kg)
  double K_e = 624.78;      // linear elastic stiffness (N/m)
  double d = 155.76;        // viscous damping (N*s/m)
  double g_signed = -9.81;  // signed gravity term (m/s^2); negative aids extension
  double A = kCalibratedArea;  // effective cross-section area (m^2)
  double p_dz = 66922.0;    // pressure dead zone (Pa)
  double p_max = 0.9e6;     // regulator saturation ceiling (Pa)
  double alpha = 23.705;    // Bouc-Wen coefficient (N/m)
  double beta = 1.7267;     // Bouc-Wen coefficient (1/m), > 0
  double gamma = -42.593;   // Bouc-Wen coefficient (1/m), unconstrained

  // Effective area backed out from the 85 mm steady-state extension at
  // 0.4 MPa; the braid makes it larger than the bare 12 mm bladder bore.
  static constexpr double kCalibratedArea = 2.1189683585006908e-04;

  double total_mass() const { return M + m; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Continuous plant state.
struct PlantState {
  double x = 0.0;  // extension (m)
  double v = 0.0;  // velocity (m/s)
  double z = 0.0;  // hysteresis force (N)

  Vec3 vec() const { return Vec3(x, v, z); }
  static PlantState from_vec(const Vec3& s) { return {s[0], s[1], s[2]}; }
  bool all_finite() const {
    return std::isfinite(x) && std::isfinite(v) && std::isfinite(z);
  }
};

inline double sgn(double s) { return double((s > 0.0) - (s < 0.0)); }

/// Pressure reaching the force balance: command clamped to [0, p_max],
/// shifted down by the dead zone and floored at zero. Total and monotone
/// non-decreasing in p_cmd.
inline double effective_pressure(double p_cmd, const PlantParams& p) {
  const double clamped = std::clamp(p_cmd, 0.0, p.p_max);
  return std::max(0.0, clamped - p.p_dz);
}

/// Bouc-Wen internal force rate z' = v [alpha - (beta sgn(v z) + gamma) |z|].
/// sgn(0) is 0. Rate-independent: z(x) along a monotone path does not
/// depend on traversal speed.
template <typename Scalar>
Scalar bouc_wen_rate(Scalar v, Scalar z, const PlantParams& p) {
  using std::abs;
  const Scalar s = Scalar(sgn(double(v * z)));
  return v * (Scalar(p.alpha) - (Scalar(p.beta) * s + Scalar(p.gamma)) * abs(z));
}

/// Right-hand side of the plant ODE for state (x, v, z) under the held
/// effective pressure. Throws on a non-finite state so the integrator can
/// flag the blow-up with its time stamp.
template <typename Scalar>
Eigen::Vector3<Scalar> dynamics_rhs(const Eigen::Vector3<Scalar>& state,
                                    double p_eff, const PlantParams& p) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    if (!state.allFinite()) {
      throw std::domain_error("dynamics_rhs: non-finite state");
    }
  }
  const Scalar x = state[0];
  const Scalar v = state[1];
  const Scalar z = state[2];
  const double mass = p.total_mass();
  Eigen::Vector3<Scalar> rates;
  rates[0] = v;
  rates[1] = (Scalar(p.A * p_eff) - Scalar(mass * p.g_signed) -
              Scalar(p.K_e) * x - Scalar(p.d) * v - z) /
             Scalar(mass);
  rates[2] = bouc_wen_rate(v, z, p);
  return rates;
}

inline Vec3 dynamics_rhs(const PlantState& state, double p_eff,
                         const PlantParams& p) {
  return dynamics_rhs<double>(state.vec(), p_eff, p);
}

/// Hysteresis force accumulated along a strictly increasing extension path
/// starting at 0, with z(0) = 0. Integrates dz/dx = alpha - (beta sgn(z) +
/// gamma) |z| with one RK4 step per path segment, so the result converges
/// at 4th order in the path resolution. Rejects non-monotone paths.
double quasi_static_z(const Eigen::Ref<const Eigen::ArrayXd>& x_path,
                      const PlantParams& p);

/// quasi_static_z over a uniform path 0 -> x_end with n_segments segments.
double quasi_static_z_to(double x_end, const PlantParams& p,
                         int n_segments = 20000);

}  // namespace pma
