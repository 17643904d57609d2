#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pma/model.hpp"
#include "pma/simulate.hpp"

namespace pma {

/// Order of the free parameters everywhere in the identification interface:
/// start-point sampling, bound boxes, result vectors and CSV columns.
enum FreeParamIndex : int {
  kAlpha = 0,
  kBeta,
  kGamma,
  kDamping,
  kStiffness,
  kDeadZone,
  kNumFreeParams
};

using FreeVec = Eigen::Matrix<double, kNumFreeParams, 1>;

inline constexpr std::array<const char*, kNumFreeParams> kFreeParamNames = {
    "alpha", "beta", "gamma", "d", "K_e", "p_dz"};

/// Cost returned for candidates whose simulation blows up, large but finite
/// so the simplex can retreat from them.
inline constexpr double kDivergencePenalty = 1e6;  // m

struct ParameterBounds {
  FreeVec lo;
  FreeVec hi;

  /// Boxes comfortably containing the identified values.
  static ParameterBounds defaults();
  /// [(1-fraction) p, (1+fraction) p] per parameter, ends swapped so that
  /// lo < hi also for negative values.
  static ParameterBounds around(const FreeVec& center, double fraction);
  bool contains(const FreeVec& candidate) const;
  void validate() const;
};

FreeVec extract_free_params(const PlantParams& p);
PlantParams apply_free_params(const FreeVec& candidate, PlantParams base);

struct IdentificationProblem {
  Eigen::ArrayXd t;       // uniform recorded grid (s)
  Eigen::ArrayXd p_cmd;   // recorded command (Pa)
  Eigen::ArrayXd x_meas;  // recorded response (m)
  PlantParams fixed;      // M, m, A, g_signed, p_max are used; the six free
                          // fields are overwritten per candidate
  ParameterBounds bounds = ParameterBounds::defaults();
  int n_starts = 20;
  std::uint64_t rng_seed = 0;
  double sim_dt = 0.0;        // 0 -> recorded grid spacing
  PlantState initial_state;   // cost simulations start here (default rest)

  double grid_dt() const;
  int substeps() const;  // grid_dt / sim_dt, validated integer
  void validate() const;
};

struct StartRecord {
  FreeVec start;
  FreeVec converged;
  double cost = 0.0;
  int iterations = 0;
};

struct IdentificationResult {
  FreeVec params_hat;
  double cost = 0.0;  // m, RMS
  int best_start_index = -1;
  std::vector<StartRecord> starts;
};

/// Pointwise mean of runs recorded on identical time grids.
Trajectory average_response(const std::vector<Trajectory>& runs);

/// Simulates the plant with the candidate free parameters under the
/// recorded command from the problem's initial state and returns the RMS
/// of the extension residual. Diverged runs cost kDivergencePenalty.
/// Rejects candidates outside the bounds.
double evaluate_cost(const FreeVec& candidate,
                     const IdentificationProblem& problem);

/// Multistart bounded Nelder-Mead over the six free parameters. Start
/// points are sampled uniformly inside the bounds from rng_seed, searches
/// run independently, and ties between equal costs break toward the lowest
/// start index. Reproducible to the bit for a fixed seed.
IdentificationResult identify(const IdentificationProblem& problem);

/// Effective area from a steady-state extension under constant pressure:
///   A = [(M+m) g_signed + K_e x_ss + z_qs(x_ss)] / (p - p_dz).
double calibrate_area(double x_ss, double p, const PlantParams& params);

/// One `name = value # unit` line per parameter plus cost and provenance;
/// written with full precision so result files compare byte-identical.
std::string format_identification_result(const IdentificationResult& result,
                                         const IdentificationProblem& problem);

/// Per-start CSV: start_index,cost,iterations,alpha,beta,gamma,d,K_e,p_dz.
std::string format_start_table(const IdentificationResult& result);

}  // namespace pma
