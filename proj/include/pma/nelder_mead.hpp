#pragma once

#include <Eigen/Core>

#include <functional>

namespace pma {

struct NelderMeadOptions {
  int max_iterations = 500;
  double spread_tolerance = 1e-7;  // stop when max - min vertex cost < this
  double initial_scale = 0.05;     // simplex edge, as a fraction of box width
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;  // spread tolerance reached before iteration cap
};

/// Derivative-free simplex minimization inside the box [lo, hi]. Candidate
/// vertices produced by reflection, expansion, contraction and shrink are
/// projected coordinate-wise onto the box, so the objective is never
/// evaluated outside it. Fully deterministic for a given starting point.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& start, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const NelderMeadOptions& options = {});

}  // namespace pma
