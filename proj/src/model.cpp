#include "pma/model.hpp"

#include <string>

namespace pma {

namespace {

void check(bool ok, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string("PlantParams: ") + what);
  }
}

// dz/dx along a path traversed with v > 0.
double loading_slope(double z, const PlantParams& p) {
  return p.alpha - (p.beta * sgn(z) + p.gamma) * std::abs(z);
}

}  // namespace

void PlantParams::validate() const {
  check(std::isfinite(M) && M >= 0.0, "M must be >= 0");
  check(std::isfinite(m) && m > 0.0, "m must be > 0");
  check(std::isfinite(K_e) && K_e > 0.0, "K_e must be > 0");
  check(std::isfinite(d) && d >= 0.0, "d must be >= 0");
  check(std::isfinite(g_signed), "g_signed must be finite");
  check(std::isfinite(A) && A > 0.0, "A must be > 0");
  check(std::isfinite(p_dz) && p_dz >= 0.0, "p_dz must be >= 0");
  check(std::isfinite(p_max) && p_max > p_dz, "p_max must be > p_dz");
  check(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
  check(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
  check(std::isfinite(gamma), "gamma must be finite");
}

double quasi_static_z(const Eigen::Ref<const Eigen::ArrayXd>& x_path,
                      const PlantParams& p) {
  if (x_path.size() < 1) {
    throw std::invalid_argument("quasi_static_z: empty path");
  }
  if (x_path[0] != 0.0) {
    throw std::invalid_argument("quasi_static_z: path must start at 0");
  }
  for (Eigen::Index i = 0; i + 1 < x_path.size(); ++i) {
    if (!(x_path[i + 1] > x_path[i])) {
      throw std::invalid_argument(
          "quasi_static_z: path must be strictly increasing");
    }
  }
  double z = 0.0;
  for (Eigen::Index i = 0; i + 1 < x_path.size(); ++i) {
    const double h = x_path[i + 1] - x_path[i];
    const double k1 = loading_slope(z, p);
    const double k2 = loading_slope(z + 0.5 * h * k1, p);
    const double k3 = loading_slope(z + 0.5 * h * k2, p);
    const double k4 = loading_slope(z + h * k3, p);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

double quasi_static_z_to(double x_end, const PlantParams& p, int n_segments) {
  if (x_end == 0.0) {
    return 0.0;
  }
  if (!(x_end > 0.0) || n_segments < 1) {
    throw std::invalid_argument("quasi_static_z_to: x_end must be > 0");
  }
  return quasi_static_z(
      Eigen::ArrayXd::LinSpaced(n_segments + 1, 0.0, x_end), p);
}

}  // namespace pma
