#include <doctest.h>

#include <cmath>
#include <vector>

#include "pma/identify.hpp"
#include "pma/nelder_mead.hpp"
#include "pma/random.hpp"
#include "pma/signals.hpp"
#include "pma/simulate.hpp"

using namespace pma;

namespace {

PressureSignal short_chirp(double duration) {
  PressureSignal sig;
  sig.kind = SignalKind::chirp;
  sig.offset = 0.25e6;
  sig.amplitude = 0.25e6;
  sig.f0 = 0.3;
  sig.f1 = 3.0;
  sig.duration = duration;
  return sig;
}

// Noiseless recording of the default plant under a short chirp.
IdentificationProblem make_problem(double duration, int n_starts,
                                   std::uint64_t seed) {
  const PlantParams truth;
  const SimClock clock{1e-3, duration};
  const Trajectory traj =
      simulate(PlantState{}, short_chirp(duration), truth, clock);
  IdentificationProblem problem;
  problem.t = traj.t;
  problem.p_cmd = traj.p_cmd;
  problem.x_meas = traj.x;
  problem.fixed = truth;
  problem.bounds = ParameterBounds::around(extract_free_params(truth), 0.5);
  problem.n_starts = n_starts;
  problem.rng_seed = seed;
  return problem;
}

}  // namespace

TEST_CASE("nelder_mead minimizes a bounded quadratic") {
  const Eigen::VectorXd target = Eigen::Vector3d(0.3, -0.2, 0.7);
  auto f = [&](const Eigen::VectorXd& x) {
    return (x - target).squaredNorm();
  };
  Eigen::VectorXd lo = Eigen::Vector3d(-1.0, -1.0, -1.0);
  Eigen::VectorXd hi = Eigen::Vector3d(1.0, 1.0, 1.0);
  const NelderMeadResult r =
      nelder_mead_minimize(f, Eigen::Vector3d(0.9, 0.9, -0.9), lo, hi);
  CHECK(r.converged);
  CHECK((r.x - target).norm() < 1e-3);
}

TEST_CASE("nelder_mead respects the box when the optimum lies outside") {
  auto f = [](const Eigen::VectorXd& x) {
    return (x - Eigen::Vector2d(2.0, 2.0)).squaredNorm();
  };
  Eigen::VectorXd lo = Eigen::Vector2d(-1.0, -1.0);
  Eigen::VectorXd hi = Eigen::Vector2d(1.0, 1.0);
  const NelderMeadResult r =
      nelder_mead_minimize(f, Eigen::Vector2d(0.0, 0.0), lo, hi);
  CHECK(r.x[0] <= 1.0 + 1e-12);
  CHECK(r.x[1] <= 1.0 + 1e-12);
  CHECK((r.x - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-3);
}

TEST_CASE("average_response") {
  const PlantParams p;
  const SimClock clock{1e-3, 1.0};
  const Trajectory one = simulate(PlantState{}, short_chirp(1.0), p, clock);

  SUBCASE("a single run averages to itself") {
    const Trajectory mean = average_response({one});
    CHECK((mean.x == one.x).all());
    CHECK((mean.p_cmd == one.p_cmd).all());
  }

  SUBCASE("opposite responses cancel") {
    Trajectory flipped = one;
    flipped.x = -one.x;
    const Trajectory mean = average_response({one, flipped});
    CHECK(mean.x.abs().maxCoeff() < 1e-18);
  }

  SUBCASE("the mean of noisy runs sits a standard error from the truth") {
    const int n_runs = 10;
    const double sigma = 5e-4;
    std::vector<Trajectory> runs(n_runs, one);
    GaussianSampler noise(99);
    for (Trajectory& run : runs) {
      for (Eigen::Index i = 0; i < run.rows(); ++i) {
        run.x[i] += sigma * noise();
      }
    }
    const Trajectory mean = average_response(runs);
    const double rms = std::sqrt((mean.x - one.x).square().mean());
    const double standard_error = sigma / std::sqrt(double(n_runs));
    CHECK(rms == doctest::Approx(standard_error).epsilon(0.10));
  }

  SUBCASE("mismatched grids are rejected") {
    const SimClock other{1e-3, 0.5};
    const Trajectory shorter =
        simulate(PlantState{}, short_chirp(1.0), p, other);
    CHECK_THROWS_AS(average_response({one, shorter}), std::invalid_argument);
  }
}

TEST_CASE("evaluate_cost") {
  IdentificationProblem problem = make_problem(2.0, 1, 1);
  const FreeVec truth = extract_free_params(problem.fixed);

  SUBCASE("self-consistency: the generating parameters cost nothing") {
    CHECK(evaluate_cost(truth, problem) < 1e-15);
  }

  SUBCASE("a constant 1 mm offset costs exactly 1 mm") {
    problem.x_meas += 1e-3;
    CHECK(evaluate_cost(truth, problem) ==
          doctest::Approx(1e-3).epsilon(1e-12));
  }

  SUBCASE("refining the integrator step changes a noisy cost by < 2%") {
    GaussianSampler noise(5);
    for (Eigen::Index i = 0; i < problem.x_meas.size(); ++i) {
      problem.x_meas[i] += 1e-4 * noise();
    }
    const double coarse = evaluate_cost(truth, problem);
    IdentificationProblem fine = problem;
    fine.sim_dt = problem.grid_dt() / 10.0;
    const double refined = evaluate_cost(truth, fine);
    CHECK(std::abs(coarse - refined) / refined < 0.02);
  }

  SUBCASE("out-of-bounds candidates are rejected") {
    FreeVec bad = truth;
    bad[kAlpha] = problem.bounds.hi[kAlpha] * 1.01;
    CHECK_THROWS_AS(evaluate_cost(bad, problem), std::invalid_argument);
  }

  SUBCASE("diverged simulations cost the finite penalty") {
    // A coarse grid puts a stiff, undamped candidate far beyond the RK4
    // stability limit.
    IdentificationProblem stiff;
    const Eigen::Index n = 200;
    stiff.t = Eigen::ArrayXd::LinSpaced(n, 0.0, 0.025 * double(n - 1));
    stiff.p_cmd = Eigen::ArrayXd::Constant(n, 3e5);
    stiff.x_meas = Eigen::ArrayXd::Zero(n);
    stiff.fixed = PlantParams{};
    stiff.bounds = ParameterBounds::defaults();
    FreeVec candidate = extract_free_params(stiff.fixed);
    candidate[kStiffness] = 9000.0;
    candidate[kDamping] = 0.0;
    CHECK(evaluate_cost(candidate, stiff) == kDivergencePenalty);
  }
}

TEST_CASE("identify recovers the response of the generating plant") {
  // Noiseless data, bounds +/-50% around the truth.
  IdentificationProblem problem = make_problem(3.0, 3, 12345);
  const IdentificationResult result = identify(problem);

  for (const StartRecord& rec : result.starts) {
    CHECK(result.cost <= rec.cost);
  }
  CHECK(int(result.starts.size()) == problem.n_starts);
  CHECK(result.cost < 2e-4);
  CHECK(problem.bounds.contains(result.params_hat));
  CHECK(result.cost ==
        doctest::Approx(evaluate_cost(result.params_hat, problem)));
}

TEST_CASE("identify is deterministic for a fixed seed") {
  IdentificationProblem problem = make_problem(1.5, 2, 777);
  const IdentificationResult a = identify(problem);
  const IdentificationResult b = identify(problem);
  CHECK(format_identification_result(a, problem) ==
        format_identification_result(b, problem));
  CHECK(format_start_table(a) == format_start_table(b));
  CHECK((a.params_hat.array() == b.params_hat.array()).all());
}

TEST_CASE("a simplex started on the truth stays there") {
  IdentificationProblem problem = make_problem(1.5, 1, 3);
  const FreeVec truth = extract_free_params(problem.fixed);
  auto objective = [&](const Eigen::VectorXd& v) {
    return evaluate_cost(FreeVec(v), problem);
  };
  const NelderMeadResult r = nelder_mead_minimize(
      objective, truth, problem.bounds.lo, problem.bounds.hi);
  CHECK(r.cost < 1e-6);
}

TEST_CASE("median recovered cost is non-decreasing in the noise level") {
  const std::vector<double> sigmas = {0.0, 1e-4, 5e-4};
  const int n_runs = 5;
  std::vector<double> medians;
  for (double sigma : sigmas) {
    std::vector<double> costs;
    for (std::uint64_t seed : {11u, 22u, 33u}) {
      IdentificationProblem problem = make_problem(1.5, 4, seed);
      std::vector<Trajectory> runs;
      Trajectory base;
      base.resize(problem.t.size(), false);
      base.t = problem.t;
      base.p_cmd = problem.p_cmd;
      base.p_eff = base.v = base.z = Eigen::ArrayXd::Zero(problem.t.size());
      base.x = problem.x_meas;
      GaussianSampler noise(seed * 1000 + 17);
      std::vector<Trajectory> noisy(n_runs, base);
      for (Trajectory& run : noisy) {
        for (Eigen::Index i = 0; i < run.rows(); ++i) {
          run.x[i] += sigma * noise();
        }
      }
      problem.x_meas = average_response(noisy).x;
      costs.push_back(identify(problem).cost);
    }
    std::sort(costs.begin(), costs.end());
    medians.push_back(costs[costs.size() / 2]);
  }
  CHECK(medians[0] <= medians[1]);
  CHECK(medians[1] <= medians[2]);
}

TEST_CASE("identify reports when every start is stuck at the penalty") {
  IdentificationProblem stiff;
  const Eigen::Index n = 200;
  stiff.t = Eigen::ArrayXd::LinSpaced(n, 0.0, 0.025 * double(n - 1));
  stiff.p_cmd = Eigen::ArrayXd::Constant(n, 3e5);
  stiff.x_meas = Eigen::ArrayXd::Zero(n);
  stiff.fixed = PlantParams{};
  stiff.bounds.lo << 20.0, 1.0, -45.0, 0.0, 8500.0, 0.0;
  stiff.bounds.hi << 25.0, 2.0, -40.0, 1.0, 10000.0, 1000.0;
  stiff.n_starts = 3;
  stiff.rng_seed = 1;
  CHECK_THROWS_WITH_AS(identify(stiff), "identify: no start converged",
                       std::runtime_error);
}

TEST_CASE("calibrate_area") {
  SUBCASE("reduces to a direct division when hysteresis is negligible") {
    PlantParams p;
    p.g_signed = 0.0;
    p.K_e = 1000.0;
    p.alpha = 1e-9;
    p.p_dz = 0.0;
    const double A = calibrate_area(0.01, 1e5, p);
    CHECK(A == doctest::Approx(1e-4).epsilon(1e-9));
  }

  SUBCASE("matches the closed-form balance at the calibration point") {
    const PlantParams p;
    const double k = -(p.beta + p.gamma);
    const double z_closed = p.alpha / k * (std::exp(k * 0.085) - 1.0);
    const double expected =
        (p.total_mass() * p.g_signed + p.K_e * 0.085 + z_closed) /
        (0.4e6 - p.p_dz);
    CHECK(calibrate_area(0.085, 0.4e6, p) ==
          doctest::Approx(expected).epsilon(1e-9));
    // The value shipped as the default area is this calibration.
    CHECK(calibrate_area(0.085, 0.4e6, p) ==
          doctest::Approx(PlantParams::kCalibratedArea).epsilon(1e-12));
  }

  SUBCASE("round trip: simulating at the calibrated area lands on 85 mm") {
    const PlantParams p;  // default A is the calibrated one
    PressureSignal step;
    step.kind = SignalKind::constant;
    step.offset = 0.4e6;
    const SimClock clock{1e-3, 30.0};
    const Trajectory traj = simulate(PlantState{}, step, p, clock);
    CHECK(std::abs(traj.x[traj.rows() - 1] - 0.085) < 2e-3);
  }

  SUBCASE("rejects inconsistent inputs") {
    PlantParams p;
    CHECK_THROWS_AS(calibrate_area(0.085, p.p_dz, p), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_area(-0.01, 0.4e6, p), std::invalid_argument);
    p.g_signed = -9.81;
    p.M = 100.0;  // gravity assistance overwhelms the restoring terms
    CHECK_THROWS_WITH_AS(calibrate_area(0.01, 0.4e6, p),
                         "calibrate_area: inconsistent calibration inputs",
                         std::invalid_argument);
  }
}

TEST_CASE("parameter bounds validation") {
  ParameterBounds b = ParameterBounds::defaults();
  CHECK_NOTHROW(b.validate());
  b.lo[kAlpha] = 0.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);

  const FreeVec center = extract_free_params(PlantParams{});
  const ParameterBounds box = ParameterBounds::around(center, 0.5);
  CHECK(box.lo[kGamma] < box.hi[kGamma]);  // negative center swaps the ends
  CHECK(box.lo[kGamma] == doctest::Approx(-42.593 * 1.5));
  CHECK(box.contains(center));
}
