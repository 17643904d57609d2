#include "pma/identify.hpp"

#include <cmath>
#include <random>

#include "pma/csv.hpp"
#include "pma/nelder_mead.hpp"

namespace pma {

namespace {

// Uniform double in [0, 1) from the raw 64-bit stream; identical across
// standard libraries, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

constexpr double kGridTolerance = 1e-9;  // s, allowed grid jitter

}  // namespace

ParameterBounds ParameterBounds::defaults() {
  ParameterBounds b;
  b.lo << 0.1, 0.01, -500.0, 0.0, 1.0, 0.0;
  b.hi << 500.0, 100.0, 500.0, 2000.0, 10000.0, 200000.0;
  return b;
}

ParameterBounds ParameterBounds::around(const FreeVec& center,
                                        double fraction) {
  ParameterBounds b;
  for (int i = 0; i < kNumFreeParams; ++i) {
    const double a = center[i] * (1.0 - fraction);
    const double c = center[i] * (1.0 + fraction);
    b.lo[i] = std::min(a, c);
    b.hi[i] = std::max(a, c);
  }
  return b;
}

bool ParameterBounds::contains(const FreeVec& candidate) const {
  return (candidate.array() >= lo.array()).all() &&
         (candidate.array() <= hi.array()).all();
}

void ParameterBounds::validate() const {
  for (int i = 0; i < kNumFreeParams; ++i) {
    if (!(lo[i] < hi[i])) {
      throw std::invalid_argument(std::string("bounds: need lo < hi for ") +
                                  kFreeParamNames[i]);
    }
  }
  if (!(lo[kAlpha] > 0.0)) {
    throw std::invalid_argument("bounds: alpha lower bound must be > 0");
  }
  if (!(lo[kBeta] > 0.0)) {
    throw std::invalid_argument("bounds: beta lower bound must be > 0");
  }
  if (!(lo[kDamping] >= 0.0)) {
    throw std::invalid_argument("bounds: d lower bound must be >= 0");
  }
  if (!(lo[kStiffness] > 0.0)) {
    throw std::invalid_argument("bounds: K_e lower bound must be > 0");
  }
  if (!(lo[kDeadZone] >= 0.0)) {
    throw std::invalid_argument("bounds: p_dz lower bound must be >= 0");
  }
}

FreeVec extract_free_params(const PlantParams& p) {
  FreeVec v;
  v << p.alpha, p.beta, p.gamma, p.d, p.K_e, p.p_dz;
  return v;
}

PlantParams apply_free_params(const FreeVec& candidate, PlantParams base) {
  base.alpha = candidate[kAlpha];
  base.beta = candidate[kBeta];
  base.gamma = candidate[kGamma];
  base.d = candidate[kDamping];
  base.K_e = candidate[kStiffness];
  base.p_dz = candidate[kDeadZone];
  return base;
}

double IdentificationProblem::grid_dt() const {
  if (t.size() < 2) {
    throw std::invalid_argument("identification: need at least two samples");
  }
  return t[1] - t[0];
}

int IdentificationProblem::substeps() const {
  if (sim_dt <= 0.0) {
    return 1;
  }
  const double ratio = grid_dt() / sim_dt;
  const int sub = int(std::lround(ratio));
  if (sub < 1 || std::abs(ratio - sub) > 1e-6) {
    throw std::invalid_argument(
        "identification: sim_dt must divide the recorded grid spacing");
  }
  return sub;
}

void IdentificationProblem::validate() const {
  if (t.size() < 2 || t.size() != p_cmd.size() || t.size() != x_meas.size()) {
    throw std::invalid_argument("identification: column sizes disagree");
  }
  const double dt = grid_dt();
  if (!(dt > 0.0)) {
    throw std::invalid_argument("identification: grid must be increasing");
  }
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
    if (std::abs(t[i + 1] - t[i] - dt) > kGridTolerance) {
      throw std::invalid_argument("identification: grid must be uniform");
    }
  }
  if (!p_cmd.isFinite().all() || !x_meas.isFinite().all()) {
    throw std::invalid_argument("identification: recorded data must be finite");
  }
  bounds.validate();
  if (n_starts < 1) {
    throw std::invalid_argument("identification: n_starts must be >= 1");
  }
  substeps();
  apply_free_params(bounds.lo + 0.5 * (bounds.hi - bounds.lo), fixed)
      .validate();
}

Trajectory average_response(const std::vector<Trajectory>& runs) {
  if (runs.empty()) {
    throw std::invalid_argument("average_response: need at least one run");
  }
  const Trajectory& first = runs.front();
  for (const Trajectory& run : runs) {
    if (run.rows() != first.rows() ||
        (run.t - first.t).abs().maxCoeff() > kGridTolerance) {
      throw std::invalid_argument("average_response: time grids disagree");
    }
  }
  Trajectory mean;
  mean.resize(first.rows(), first.has_reference());
  mean.t = first.t;
  auto accumulate = [&](Eigen::ArrayXd Trajectory::* col) {
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(first.rows());
    for (const Trajectory& run : runs) {
      sum += run.*col;
    }
    mean.*col = sum / double(runs.size());
  };
  accumulate(&Trajectory::p_cmd);
  accumulate(&Trajectory::p_eff);
  accumulate(&Trajectory::x);
  accumulate(&Trajectory::v);
  accumulate(&Trajectory::z);
  if (first.has_reference()) {
    accumulate(&Trajectory::x_d);
    accumulate(&Trajectory::v_d);
    accumulate(&Trajectory::e);
  }
  return mean;
}

double evaluate_cost(const FreeVec& candidate,
                     const IdentificationProblem& problem) {
  if (!candidate.allFinite() || !problem.bounds.contains(candidate)) {
    throw std::invalid_argument("evaluate_cost: candidate outside bounds");
  }
  const PlantParams params = apply_free_params(candidate, problem.fixed);
  Trajectory sim;
  try {
    sim = simulate_recorded(problem.initial_state, problem.p_cmd,
                            problem.grid_dt(), params, problem.substeps());
  } catch (const DivergenceError&) {
    return kDivergencePenalty;
  }
  const double mse = (sim.x - problem.x_meas).square().mean();
  if (!std::isfinite(mse)) {
    return kDivergencePenalty;
  }
  return std::sqrt(mse);
}

IdentificationResult identify(const IdentificationProblem& problem) {
  problem.validate();

  // All start points come from one seeded stream, drawn up front so the
  // sampling is independent of how the searches are scheduled.
  std::mt19937_64 rng(problem.rng_seed);
  std::vector<FreeVec> starts(size_t(problem.n_starts));
  for (FreeVec& s : starts) {
    for (int i = 0; i < kNumFreeParams; ++i) {
      s[i] = problem.bounds.lo[i] +
             uniform01(rng) * (problem.bounds.hi[i] - problem.bounds.lo[i]);
    }
  }

  IdentificationResult result;
  result.starts.reserve(starts.size());
  auto objective = [&](const Eigen::VectorXd& v) {
    return evaluate_cost(FreeVec(v), problem);
  };
  for (const FreeVec& start : starts) {
    const NelderMeadResult nm = nelder_mead_minimize(
        objective, start, problem.bounds.lo, problem.bounds.hi);
    result.starts.push_back(
        {start, FreeVec(nm.x), nm.cost, nm.iterations});
  }

  result.best_start_index = -1;
  for (size_t i = 0; i < result.starts.size(); ++i) {
    if (result.best_start_index < 0 ||
        result.starts[i].cost <
            result.starts[size_t(result.best_start_index)].cost) {
      result.best_start_index = int(i);
    }
  }
  const StartRecord& best = result.starts[size_t(result.best_start_index)];
  if (best.cost >= kDivergencePenalty) {
    throw std::runtime_error("identify: no start converged");
  }
  result.params_hat = best.converged;
  result.cost = best.cost;
  return result;
}

double calibrate_area(double x_ss, double p, const PlantParams& params) {
  if (!(x_ss > 0.0)) {
    throw std::invalid_argument("calibrate_area: x_ss must be > 0");
  }
  if (!(p > params.p_dz)) {
    throw std::invalid_argument("calibrate_area: p must exceed the dead zone");
  }
  const double z_qs = quasi_static_z_to(x_ss, params);
  const double numerator =
      params.total_mass() * params.g_signed + params.K_e * x_ss + z_qs;
  if (!(numerator > 0.0)) {
    throw std::invalid_argument("calibrate_area: inconsistent calibration inputs");
  }
  return numerator / (p - params.p_dz);
}

std::string format_identification_result(
    const IdentificationResult& result, const IdentificationProblem& problem) {
  static constexpr std::array<const char*, kNumFreeParams> kUnits = {
      "N/m", "1/m", "1/m", "N*s/m", "N/m", "Pa"};
  std::string out;
  for (int i = 0; i < kNumFreeParams; ++i) {
    out += std::string(kFreeParamNames[size_t(i)]) + " = " +
           format_full(result.params_hat[i]) + " # " + kUnits[size_t(i)] +
           "\n";
  }
  out += "cost = " + format_full(result.cost) + " # m RMS\n";
  out += "best_start_index = " + std::to_string(result.best_start_index) +
         " # of " + std::to_string(result.starts.size()) + " starts\n";
  out += "rng_seed = " + std::to_string(problem.rng_seed) + "\n";
  out += "n_samples = " + std::to_string(problem.t.size()) + "\n";
  return out;
}

std::string format_start_table(const IdentificationResult& result) {
  std::string out = "start_index,cost,iterations,alpha,beta,gamma,d,K_e,p_dz\n";
  for (size_t i = 0; i < result.starts.size(); ++i) {
    const StartRecord& rec = result.starts[i];
    out += std::to_string(i) + ',' + format_full(rec.cost) + ',' +
           std::to_string(rec.iterations);
    for (int j = 0; j < kNumFreeParams; ++j) {
      out += ',';
      out += format_full(rec.converged[j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace pma
